/*
 * Copyright 2026 The avxsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "avxsim/engine.hpp"
#include "avxsim/workloads.hpp"

namespace avxsim {

enum class WorkloadType : std::uint8_t { Web, Microbench, Trace };

struct WorkloadConfig {
    WorkloadType type = WorkloadType::Web;
    WebWorkloadParams web;
    MicrobenchParams microbench;
    /// Loop lengths visited by `sweep`.
    std::vector<std::int64_t> loop_cycles_sweep;
    std::filesystem::path trace_path; // absolute once loaded
    bool strict = false;
};

struct OutputConfig {
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> trace;
    std::optional<std::filesystem::path> folded;
};

/// Everything one simulation needs, as read from a config file.
///
/// The file is JSON; `//` and `/* */` comments are accepted. Durations are
/// nanoseconds. Relative paths resolve against the config file's directory.
struct SimConfigFile {
    SimConfig sim;
    WorkloadConfig workload;
    OutputConfig output;

    /// Cross-field checks; throws ConfigError with a dotted path.
    void validate() const;

    nlohmann::ordered_json to_json() const;
};

SimConfigFile parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
SimConfigFile load_config(const std::filesystem::path& path);

/// Tasks for the configured workload, seeded with sim.run.seed.
std::vector<TaskSpec> build_workload(const SimConfigFile& cfg);

/// The SimConfig a web-workload run uses for `variant` under `policy`.
SimConfigFile with_variant(const SimConfigFile& cfg, SimdVariant variant, Policy policy);

} // namespace avxsim

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "avxsim/config.hpp"

namespace avxsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> trace;
    std::optional<std::filesystem::path> folded;
    std::optional<std::filesystem::path> report;
    int jobs = 0; // < 1: all available threads
    bool json = false;
};

struct CompareCell {
    SimdVariant variant;
    Policy policy;
    double units_per_sec = 0.0;
    double mean_freq_ghz = 0.0;
    double delta = 0.0; // relative to the SSE4 / baseline cell
};

struct CompareResult {
    std::vector<CompareCell> cells; // variant-major, baseline first
    /// 1 - (core-spec delta / baseline delta); nullopt where the baseline delta is zero.
    std::array<std::optional<double>, 3> variability_reduction{};

    const CompareCell& cell(SimdVariant v, Policy p) const;
    std::string to_text() const;
    nlohmann::ordered_json to_json() const;
};

struct SweepPoint {
    std::int64_t loop_cycles = 0;
    double kind_changes_per_sec = 0.0; // per core-second
    double overhead = 0.0;             // fraction, e.g. 0.03 for 3 %
    double units_per_sec = 0.0;
    double reference_units_per_sec = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points; // ascending rate
    /// Two columns: rate, overhead in percent.
    std::string to_text() const;
    nlohmann::ordered_json to_json() const;
};

/// 3 variants x 2 policies of a web configuration.
CompareResult run_compare(const SimConfigFile& cfg, int jobs = 0);

/// Core-specialization microbenchmark at every configured loop length, each
/// against the same run with the annotations removed.
SweepResult run_sweep(const SimConfigFile& cfg, int jobs = 0);

int cmd_simulate(const std::filesystem::path& config_path, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_compare(const std::filesystem::path& config_path, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_sweep(const std::filesystem::path& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_analyze(const std::vector<std::filesystem::path>& listings, double min_ratio, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

} // namespace avxsim

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
#include <string>
#include <vector>

#include <json.hpp>

#include "avxsim/freqmodel.hpp"
#include "avxsim/time.hpp"

namespace avxsim {

struct CoreReport {
    int core = 0;
    bool avx_core = false;
    LicenseCounters counters; // measured window only
    double mean_freq_ghz = 0.0;
};

struct TaskReport {
    std::string name;
    std::string final_kind;
    std::int64_t units = 0;
    std::int64_t migrations = 0;
    std::int64_t kind_changes = 0;
    std::int64_t preemptions = 0;
    std::int64_t dispatches = 0;
    std::int64_t executed_cycles = 0;
    std::int64_t overhead_cycles = 0;
    SimTime max_wait{};
    SimTime total_wait{};
};

/// THROTTLE cycles charged to one section of one task.
struct AttributionRecord {
    std::string task;
    std::string label;
    std::int64_t cycles = 0;
};

struct SimReport {
    std::string policy;
    std::uint64_t seed = 0;
    SimTime end_time{};
    SimTime warmup{};
    SimTime measured_wall{};
    bool drained = false;

    std::int64_t units = 0;
    double units_per_sec = 0.0;
    /// Sum over cycles of their frequency, divided by the cycle count, across
    /// all cores in the measured window.
    double mean_freq_ghz = 0.0;
    std::int64_t kind_changes = 0;
    double kind_changes_per_sec = 0.0;
    /// Kind changes per second of a single core's time.
    double kind_changes_per_core_sec = 0.0;

    std::vector<CoreReport> cores;
    std::vector<TaskReport> tasks;
    std::vector<AttributionRecord> attribution; // sorted by (task, label)

    // Whole-run totals, warmup included, for conservation checks.
    std::int64_t total_core_cycles = 0;
    std::int64_t total_task_cycles = 0;
    std::int64_t zero_cycle_segments_skipped = 0;
    std::vector<std::string> warnings;

    LicenseCounters counter_sum() const;
    std::int64_t throttle_cycles() const { return counter_sum().throttle; }

    nlohmann::ordered_json to_json() const;
    /// Aligned human-readable summary.
    std::string to_text() const;
};

} // namespace avxsim

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
#include "avxsim/report.hpp"

#include <cstdio>
#include <sstream>

namespace avxsim {

namespace {

nlohmann::ordered_json counters_json(const LicenseCounters& c) {
    nlohmann::ordered_json j;
    j["LVL0_TURBO_LICENSE"] = c.lvl0;
    j["LVL1_TURBO_LICENSE"] = c.lvl1;
    j["LVL2_TURBO_LICENSE"] = c.lvl2;
    j["THROTTLE"] = c.throttle;
    return j;
}

// Fixed precision so that reports compare byte-for-byte.
std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

LicenseCounters SimReport::counter_sum() const {
    LicenseCounters sum;
    for (const auto& c : cores) sum += c.counters;
    return sum;
}

nlohmann::ordered_json SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["policy"] = policy;
    j["seed"] = seed;
    j["end_time_ns"] = end_time.to_ns_string();
    j["warmup_ns"] = warmup.to_ns_string();
    j["measured_wall_ns"] = measured_wall.to_ns_string();
    j["drained"] = drained;
    j["units"] = units;
    j["units_per_sec"] = fixed(units_per_sec, 3);
    j["mean_freq_ghz"] = fixed(mean_freq_ghz, 6);
    j["kind_changes"] = kind_changes;
    j["kind_changes_per_sec"] = fixed(kind_changes_per_sec, 3);
    j["kind_changes_per_core_sec"] = fixed(kind_changes_per_core_sec, 3);
    j["counters"] = counters_json(counter_sum());

    auto& jc = j["cores"] = nlohmann::ordered_json::array();
    for (const auto& c : cores) {
        nlohmann::ordered_json e;
        e["core"] = c.core;
        e["avx_core"] = c.avx_core;
        e["mean_freq_ghz"] = fixed(c.mean_freq_ghz, 6);
        e["counters"] = counters_json(c.counters);
        jc.push_back(std::move(e));
    }
    auto& jt = j["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : tasks) {
        nlohmann::ordered_json e;
        e["name"] = t.name;
        e["final_kind"] = t.final_kind;
        e["units"] = t.units;
        e["migrations"] = t.migrations;
        e["kind_changes"] = t.kind_changes;
        e["preemptions"] = t.preemptions;
        e["dispatches"] = t.dispatches;
        e["executed_cycles"] = t.executed_cycles;
        e["overhead_cycles"] = t.overhead_cycles;
        e["total_wait_ns"] = t.total_wait.to_ns_string();
        e["max_wait_ns"] = t.max_wait.to_ns_string();
        jt.push_back(std::move(e));
    }
    auto& ja = j["throttle_attribution"] = nlohmann::ordered_json::array();
    for (const auto& a : attribution) ja.push_back({{"task", a.task}, {"label", a.label}, {"cycles", a.cycles}});
    j["total_core_cycles"] = total_core_cycles;
    j["total_task_cycles"] = total_task_cycles;
    j["zero_cycle_segments_skipped"] = zero_cycle_segments_skipped;
    j["warnings"] = warnings;
    return j;
}

std::string SimReport::to_text() const {
    std::ostringstream os;
    char line[256];
    const auto sum = counter_sum();
    std::snprintf(line, sizeof line, "%-22s %s\n", "policy", policy.c_str());
    os << line;
    std::snprintf(line, sizeof line, "%-22s %s ns%s\n", "measured wall", measured_wall.to_ns_string().c_str(),
                  drained ? " (drained)" : "");
    os << line;
    std::snprintf(line, sizeof line, "%-22s %lld\n", "units", static_cast<long long>(units));
    os << line;
    std::snprintf(line, sizeof line, "%-22s %.3f\n", "units/s", units_per_sec);
    os << line;
    std::snprintf(line, sizeof line, "%-22s %.4f GHz\n", "mean frequency", mean_freq_ghz);
    os << line;
    std::snprintf(line, sizeof line, "%-22s %lld (%.1f/s, %.1f/core-s)\n", "kind changes",
                  static_cast<long long>(kind_changes), kind_changes_per_sec, kind_changes_per_core_sec);
    os << line;

    os << "\n";
    std::snprintf(line, sizeof line, "%-5s %-4s %8s %16s %16s %16s %16s\n", "core", "avx", "GHz",
                  "LVL0_TURBO", "LVL1_TURBO", "LVL2_TURBO", "THROTTLE");
    os << line;
    auto row = [&](const std::string& name, const char* avx, double ghz, const LicenseCounters& c) {
        std::snprintf(line, sizeof line, "%-5s %-4s %8.4f %16lld %16lld %16lld %16lld\n", name.c_str(), avx, ghz,
                      static_cast<long long>(c.lvl0), static_cast<long long>(c.lvl1),
                      static_cast<long long>(c.lvl2), static_cast<long long>(c.throttle));
        os << line;
    };
    for (const auto& c : cores) row(std::to_string(c.core), c.avx_core ? "yes" : "", c.mean_freq_ghz, c.counters);
    row("all", "", mean_freq_ghz, sum);

    if (!attribution.empty()) {
        os << "\nthrottle attribution\n";
        for (const auto& a : attribution) {
            std::snprintf(line, sizeof line, "  %-30s %-20s %14lld\n", a.task.c_str(), a.label.c_str(),
                          static_cast<long long>(a.cycles));
            os << line;
        }
    }
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    return os.str();
}

} // namespace avxsim

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
#include <optional>
#include <string_view>

#include "avxsim/time.hpp"

namespace avxsim {

/// Turbo license tier. L0 is the fastest (scalar / light vector code), L2 the
/// slowest (heavy 512-bit multiply/FMA).
enum class FrequencyLevel : std::uint8_t { L0 = 0, L1 = 1, L2 = 2 };

inline constexpr std::array<FrequencyLevel, 3> kAllLevels = {FrequencyLevel::L0, FrequencyLevel::L1,
                                                             FrequencyLevel::L2};

/// True if `a` runs at a strictly lower frequency than `b`.
constexpr bool slower_than(FrequencyLevel a, FrequencyLevel b) {
    return static_cast<int>(a) > static_cast<int>(b);
}

std::string_view to_string(FrequencyLevel level);
std::optional<FrequencyLevel> parse_level(std::string_view text);

struct CpuParams {
    // Xeon Gold 6130 all-core turbo figures.
    std::array<double, 3> freq_ghz{2.8, 2.4, 1.9};
    SimTime license_grant_delay = SimTime::from_us(500);
    SimTime revert_delay = SimTime::from_ms(2);
    std::int64_t detection_delay_cycles = 100;
    /// Multiplier on the target level's frequency while a license request is
    /// pending.
    double throttle_speed_factor = 1.0;

    double freq(FrequencyLevel level) const { return freq_ghz[static_cast<std::size_t>(level)]; }

    /// Throws ConfigError (field path relative to the cpu section).
    void validate() const;
};

/// Cycle tallies in the shape of the CORE_POWER.* performance events.
///
/// THROTTLE cycles are additionally split by the level being requested so the
/// frequency they ran at can be recovered exactly.
struct LicenseCounters {
    std::int64_t lvl0 = 0;
    std::int64_t lvl1 = 0;
    std::int64_t lvl2 = 0;
    std::int64_t throttle = 0;
    std::int64_t throttle_to_l1 = 0;
    std::int64_t throttle_to_l2 = 0;

    std::int64_t total() const { return lvl0 + lvl1 + lvl2 + throttle; }

    /// Sum over cycles of the frequency each cycle ran at (cycles x GHz).
    double frequency_weighted_cycles(const CpuParams& params) const;

    /// Cycle-weighted mean frequency; 0 when no cycles were tallied.
    double mean_frequency_ghz(const CpuParams& params) const;

    LicenseCounters& operator+=(const LicenseCounters& o);
    LicenseCounters operator-(const LicenseCounters& o) const;
    bool operator==(const LicenseCounters&) const = default;
};

struct PendingRequest {
    FrequencyLevel target;
    SimTime grant_at;
};

/// Per-core power-license state machine.
///
/// Lowering the frequency is a three step affair: the core first has to
/// notice the instruction mix (detection, counted in cycles), then asks the
/// PCU for a license and runs throttled until the grant arrives. Raising it
/// again happens only after `revert_delay` without AVX-heavy execution, and
/// always straight back to L0.
///
/// The license never schedules anything itself. Callers read `pending()` and
/// `revert_at()` after each operation and arm timers tagged with
/// `grant_epoch()` / `revert_epoch()`; a timer whose epoch no longer matches
/// is stale and must be dropped.
class FrequencyLicense {
public:
    FrequencyLicense(int core_id, const CpuParams& params);

    /// An AVX-heavy segment begins executing. Cancels any pending revert.
    /// Returns the number of cycles the core must execute before it raises a
    /// license request, or nullopt if the current (or pending) license already
    /// covers `demand`. Throws InvalidDemandError for L0.
    std::optional<std::int64_t> on_demand_start(FrequencyLevel demand, SimTime now);

    /// Detection finished at `now`: raise the request found by the last
    /// on_demand_start. If a shallower request is already pending it is
    /// deepened in place and keeps its grant time. Returns the grant time.
    SimTime raise_request(SimTime now);

    /// PCU grant. Throws InternalInconsistencyError if nothing is pending.
    void on_grant(SimTime now);

    /// The AVX-heavy segment stopped executing (finished or descheduled).
    void on_demand_end(SimTime now);

    /// Revert timer fired: back to L0, any pending request is dropped.
    void on_revert(SimTime now);

    double effective_frequency() const;

    /// Adds executed cycles to THROTTLE while a request is pending, else to
    /// the granted level. Throws std::invalid_argument for negative counts.
    void tally(std::int64_t cycles);

    int core_id() const { return core_id_; }
    FrequencyLevel granted() const { return granted_; }
    const std::optional<PendingRequest>& pending() const { return pending_; }
    const std::optional<SimTime>& revert_at() const { return revert_at_; }
    std::optional<FrequencyLevel> detecting() const { return detecting_; }
    const LicenseCounters& counters() const { return counters_; }
    std::uint64_t grant_epoch() const { return grant_epoch_; }
    std::uint64_t revert_epoch() const { return revert_epoch_; }
    const CpuParams& params() const { return *params_; }

private:
    int core_id_;
    const CpuParams* params_;
    FrequencyLevel granted_ = FrequencyLevel::L0;
    std::optional<PendingRequest> pending_;
    std::optional<SimTime> revert_at_;
    std::optional<FrequencyLevel> detecting_;
    LicenseCounters counters_;
    std::uint64_t grant_epoch_ = 0;
    std::uint64_t revert_epoch_ = 0;
};

} // namespace avxsim

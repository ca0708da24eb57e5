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
#include "avxsim/freqmodel.hpp"

#include <stdexcept>
#include <string>

#include "avxsim/error.hpp"

namespace avxsim {

std::string_view to_string(FrequencyLevel level) {
    switch (level) {
    case FrequencyLevel::L0: return "L0";
    case FrequencyLevel::L1: return "L1";
    case FrequencyLevel::L2: return "L2";
    }
    return "?";
}

std::optional<FrequencyLevel> parse_level(std::string_view text) {
    if (text == "L0") return FrequencyLevel::L0;
    if (text == "L1") return FrequencyLevel::L1;
    if (text == "L2") return FrequencyLevel::L2;
    return std::nullopt;
}

void CpuParams::validate() const {
    if (!(freq_ghz[2] > 0.0))
        throw ConfigError("freq_ghz.L2", "must be positive");
    if (!(freq_ghz[1] > freq_ghz[2]))
        throw ConfigError("freq_ghz.L1", "must exceed freq_ghz.L2");
    if (!(freq_ghz[0] > freq_ghz[1]))
        throw ConfigError("freq_ghz.L0", "must exceed freq_ghz.L1");
    if (license_grant_delay < SimTime{})
        throw ConfigError("license_grant_delay", "must not be negative");
    if (revert_delay < SimTime{})
        throw ConfigError("revert_delay", "must not be negative");
    if (detection_delay_cycles < 0)
        throw ConfigError("detection_delay_cycles", "must not be negative");
    if (!(throttle_speed_factor > 0.0 && throttle_speed_factor <= 1.0))
        throw ConfigError("throttle_speed_factor", "must lie in (0, 1]");
}

double LicenseCounters::frequency_weighted_cycles(const CpuParams& p) const {
    const double k = p.throttle_speed_factor;
    return static_cast<double>(lvl0) * p.freq(FrequencyLevel::L0) +
           static_cast<double>(lvl1) * p.freq(FrequencyLevel::L1) +
           static_cast<double>(lvl2) * p.freq(FrequencyLevel::L2) +
           static_cast<double>(throttle_to_l1) * p.freq(FrequencyLevel::L1) * k +
           static_cast<double>(throttle_to_l2) * p.freq(FrequencyLevel::L2) * k;
}

double LicenseCounters::mean_frequency_ghz(const CpuParams& p) const {
    const auto n = total();
    return n == 0 ? 0.0 : frequency_weighted_cycles(p) / static_cast<double>(n);
}

LicenseCounters& LicenseCounters::operator+=(const LicenseCounters& o) {
    lvl0 += o.lvl0;
    lvl1 += o.lvl1;
    lvl2 += o.lvl2;
    throttle += o.throttle;
    throttle_to_l1 += o.throttle_to_l1;
    throttle_to_l2 += o.throttle_to_l2;
    return *this;
}

LicenseCounters LicenseCounters::operator-(const LicenseCounters& o) const {
    LicenseCounters r = *this;
    r.lvl0 -= o.lvl0;
    r.lvl1 -= o.lvl1;
    r.lvl2 -= o.lvl2;
    r.throttle -= o.throttle;
    r.throttle_to_l1 -= o.throttle_to_l1;
    r.throttle_to_l2 -= o.throttle_to_l2;
    return r;
}

FrequencyLicense::FrequencyLicense(int core_id, const CpuParams& params)
    : core_id_(core_id), params_(&params) {}

std::optional<std::int64_t> FrequencyLicense::on_demand_start(FrequencyLevel demand, SimTime now) {
    (void)now;
    if (demand == FrequencyLevel::L0)
        throw InvalidDemandError("core " + std::to_string(core_id_) + ": L0 is not an AVX demand");

    if (revert_at_) {
        revert_at_.reset();
        ++revert_epoch_;
    }
    detecting_.reset();

    if (!slower_than(demand, granted_)) return std::nullopt;
    if (pending_ && !slower_than(demand, pending_->target)) return std::nullopt;

    detecting_ = demand;
    return params_->detection_delay_cycles;
}

SimTime FrequencyLicense::raise_request(SimTime now) {
    if (!detecting_)
        throw InternalInconsistencyError("core " + std::to_string(core_id_) +
                                         ": license request without detection");
    const FrequencyLevel target = *detecting_;
    detecting_.reset();
    if (pending_) {
        // Deepen the outstanding request; the PCU answers both at once.
        if (slower_than(target, pending_->target)) pending_->target = target;
        return pending_->grant_at;
    }
    pending_ = PendingRequest{target, now + params_->license_grant_delay};
    ++grant_epoch_;
    return pending_->grant_at;
}

void FrequencyLicense::on_grant(SimTime now) {
    (void)now;
    if (!pending_)
        throw InternalInconsistencyError("core " + std::to_string(core_id_) +
                                         ": license grant with no pending request");
    granted_ = pending_->target;
    pending_.reset();
}

void FrequencyLicense::on_demand_end(SimTime now) {
    detecting_.reset();
    if (granted_ == FrequencyLevel::L0 && !pending_) return;
    revert_at_ = now + params_->revert_delay;
    ++revert_epoch_;
}

void FrequencyLicense::on_revert(SimTime now) {
    (void)now;
    granted_ = FrequencyLevel::L0;
    revert_at_.reset();
    ++revert_epoch_;
    if (pending_) {
        pending_.reset();
        ++grant_epoch_;
    }
}

double FrequencyLicense::effective_frequency() const {
    if (pending_) return params_->freq(pending_->target) * params_->throttle_speed_factor;
    return params_->freq(granted_);
}

void FrequencyLicense::tally(std::int64_t cycles) {
    if (cycles < 0) throw std::invalid_argument("tally: negative cycle count");
    if (pending_) {
        counters_.throttle += cycles;
        if (pending_->target == FrequencyLevel::L1)
            counters_.throttle_to_l1 += cycles;
        else
            counters_.throttle_to_l2 += cycles;
        return;
    }
    switch (granted_) {
    case FrequencyLevel::L0: counters_.lvl0 += cycles; break;
    case FrequencyLevel::L1: counters_.lvl1 += cycles; break;
    case FrequencyLevel::L2: counters_.lvl2 += cycles; break;
    }
}

} // namespace avxsim

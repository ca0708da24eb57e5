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

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace avxsim {

/// Simulated time (or duration) with picosecond resolution.
///
/// Picoseconds keep per-piece rounding far below the nanosecond level while
/// an int64 still covers ~106 days of simulated time.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ps(std::int64_t ps) { return SimTime{ps}; }
    static SimTime from_ns(double ns);
    static constexpr SimTime from_us(std::int64_t us) { return SimTime{us * 1'000'000}; }
    static constexpr SimTime from_ms(std::int64_t ms) { return SimTime{ms * 1'000'000'000}; }
    static constexpr SimTime max() { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

    constexpr std::int64_t ps() const { return ps_; }
    constexpr double ns() const { return static_cast<double>(ps_) / 1e3; }
    constexpr double seconds() const { return static_cast<double>(ps_) / 1e12; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{ps_ + o.ps_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{ps_ - o.ps_}; }
    constexpr SimTime& operator+=(SimTime o) { ps_ += o.ps_; return *this; }
    constexpr SimTime& operator-=(SimTime o) { ps_ -= o.ps_; return *this; }

    /// Fixed-point nanoseconds with three decimals ("1234.567"), no floating
    /// point involved so traces are byte-stable.
    std::string to_ns_string() const;

private:
    constexpr explicit SimTime(std::int64_t ps) : ps_(ps) {}
    std::int64_t ps_ = 0;
};

/// Time needed to retire `cycles` at `ghz`, rounded up to whole picoseconds.
SimTime duration_for(double cycles, double ghz);

/// Cycles retired during `d` at `ghz` (fractional).
double cycles_in(SimTime d, double ghz);

} // namespace avxsim

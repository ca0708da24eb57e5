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
#include "avxsim/time.hpp"

#include <cmath>
#include <cstdio>

namespace avxsim {

SimTime SimTime::from_ns(double ns) {
    return SimTime{static_cast<std::int64_t>(std::llround(ns * 1e3))};
}

std::string SimTime::to_ns_string() const {
    std::int64_t v = ps_;
    const char* sign = "";
    if (v < 0) {
        sign = "-";
        v = -v;
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%lld.%03lld", sign, static_cast<long long>(v / 1000),
                  static_cast<long long>(v % 1000));
    return buf;
}

SimTime duration_for(double cycles, double ghz) {
    if (cycles <= 0.0) return SimTime{};
    // 1 GHz == 1 cycle per 1000 ps. The small slack keeps exact quotients
    // such as 2.8e6 / 2.8 from rounding up by one picosecond.
    const double ps = cycles * 1e3 / ghz;
    return SimTime::from_ps(static_cast<std::int64_t>(std::ceil(ps - ps * 1e-15 - 1e-9)));
}

double cycles_in(SimTime d, double ghz) {
    return static_cast<double>(d.ps()) * ghz / 1e3;
}

} // namespace avxsim

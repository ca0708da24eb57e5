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
#include <doctest.h>

#include "avxsim/batch.hpp"
#include "checker.hpp"

using namespace avxsim;
using avxsim::testing::CheckStats;

// The acceptance binary runs the full 1000; 200 keep the unit suite quick.
TEST_CASE("properties: random scenarios keep every invariant") {
    constexpr std::size_t kRuns = 200;
    std::vector<CheckStats> stats(kRuns);
    parallel_for(kRuns, 0, [&](std::size_t i) { stats[i] = testing::check_scenario(testing::random_scenario(1000 + i)); });

    std::int64_t reverts = 0, instants = 0;
    for (std::size_t i = 0; i < kRuns; ++i) {
        CAPTURE(i);
        CAPTURE(stats[i].first_problem);
        CHECK(stats[i].clean());
        reverts += stats[i].reverts_seen;
        instants += stats[i].instants;
    }
    // The suite is only meaningful if it exercises reverts and many instants.
    CHECK(reverts > 100);
    CHECK(instants > 100'000);
}

TEST_CASE("properties: scenarios are reproducible") {
    const auto a = testing::random_scenario(42);
    const auto b = testing::random_scenario(42);
    CHECK(run_simulation(a.config, a.tasks).to_json().dump() == run_simulation(b.config, b.tasks).to_json().dump());
}

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

#include <atomic>
#include <stdexcept>

#include "avxsim/batch.hpp"
#include "checker.hpp"

using namespace avxsim;

TEST_CASE("batch: resolve_jobs") {
    CHECK(resolve_jobs(3) == 3);
    CHECK(resolve_jobs(0) >= 1);
    CHECK(resolve_jobs(-5) == resolve_jobs(0));
}

TEST_CASE("batch: parallel_for visits every index once") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) { throw std::runtime_error("never"); }));
}

TEST_CASE("batch: the lowest failing index wins") {
    std::atomic<int> calls{0};
    try {
        parallel_for(50, 4, [&](std::size_t i) {
            calls.fetch_add(1);
            if (i == 31 || i == 7 || i == 40) throw std::runtime_error("job " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "job 7");
    }
    CHECK(calls.load() == 50);
}

TEST_CASE("batch: parallel reports equal the serial reference byte for byte") {
    std::vector<SimJob> jobs;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto sc = testing::random_scenario(seed);
        jobs.push_back(SimJob{sc.config, sc.tasks});
    }
    const auto serial = run_batch_serial(jobs);
    const auto parallel = run_batch_parallel(jobs, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CAPTURE(i);
        CHECK(serial[i].to_json().dump() == parallel[i].to_json().dump());
    }
}

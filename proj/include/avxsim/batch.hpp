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

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "avxsim/engine.hpp"

namespace avxsim {

struct SimJob {
    SimConfig config;
    std::vector<TaskSpec> tasks;
};

/// Number of worker threads `jobs` stands for: values < 1 mean "all
/// available".
int resolve_jobs(int jobs);

/// Runs `n` independent calls fn(0) .. fn(n-1) on up to `jobs` OpenMP threads.
/// The first exception (lowest index) is rethrown after every call finished.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Reference path: one job after the other on the calling thread.
std::vector<SimReport> run_batch_serial(const std::vector<SimJob>& jobs);

/// Same results as run_batch_serial, in the same order.
std::vector<SimReport> run_batch_parallel(const std::vector<SimJob>& jobs, int threads = 0);

} // namespace avxsim

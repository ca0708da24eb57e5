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
#include "avxsim/batch.hpp"

#include <omp.h>

namespace avxsim {

int resolve_jobs(int jobs) { return jobs >= 1 ? jobs : omp_get_max_threads(); }

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
    // Simulations differ wildly in cost, hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_jobs(jobs))
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<SimReport> run_batch_serial(const std::vector<SimJob>& jobs) {
    std::vector<SimReport> out;
    out.reserve(jobs.size());
    for (const auto& j : jobs) out.push_back(run_simulation(j.config, j.tasks));
    return out;
}

std::vector<SimReport> run_batch_parallel(const std::vector<SimJob>& jobs, int threads) {
    std::vector<SimReport> out(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) { out[i] = run_simulation(jobs[i].config, jobs[i].tasks); });
    return out;
}

} // namespace avxsim

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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "avxsim/program.hpp"
#include "avxsim/time.hpp"

namespace avxsim {

using TaskId = int;

enum class Policy : std::uint8_t { Baseline, CoreSpecialization };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view text);

struct SchedParams {
    Policy policy = Policy::Baseline;
    int n_cores = 12;
    /// Cores allowed to run Avx-kind tasks under core specialization.
    std::vector<int> avx_core_ids{10, 11};
    SimTime rr_interval = SimTime::from_ms(6);
    /// Added to a Scalar task's deadline when an AVX core compares it. Must
    /// exceed every deadline reachable within the simulated horizon.
    SimTime scalar_penalty = SimTime::from_ms(1'000'000);
    /// All-in cost of one with_avx()/without_avx() call.
    SimTime kind_change_cost = SimTime::from_ns(225);
    SimTime migration_cost{};
    /// Context switch charged on the core that receives a preemption IPI.
    SimTime preempt_cost{};

    bool is_avx_core(int core) const;
    /// Throws ConfigError (field path relative to the sched section).
    void validate() const;
};

enum class TaskState : std::uint8_t { Pending, Queued, Running, Finished };

struct TaskStats {
    std::int64_t units = 0;
    std::int64_t migrations = 0;
    std::int64_t kind_changes = 0;
    std::int64_t preemptions = 0;
    std::int64_t dispatches = 0;
    std::int64_t executed_cycles = 0; // program work + overhead, as tallied
    std::int64_t overhead_cycles = 0;
    SimTime total_wait{};
    SimTime max_wait{};
};

/// A schedulable entity together with its execution cursor.
struct Task {
    TaskId id = 0;
    std::string name;
    TaskKind kind = TaskKind::Untyped;
    SimTime deadline{};
    double priority_ratio = 1.0;
    std::shared_ptr<const Program> program;

    // Execution cursor. The engine owns these fields.
    std::size_t pc = 0;
    double entry_done = 0.0;          // fractional cycles of the current compute entry
    std::int64_t entry_tallied = 0;   // whole cycles already tallied for it
    bool kind_cost_paid = false;      // current SetKind entry already charged
    std::int64_t overhead_total = 0;  // outstanding scheduler overhead (cycles)
    double overhead_done = 0.0;
    std::int64_t overhead_tallied = 0;
    SimTime pending_overhead_time{};  // charged but not yet converted to cycles
    SimTime slice_left{};

    TaskState state = TaskState::Pending;
    int core = -1; // running core, or the core whose queue holds the task
    SimTime enqueued_at{};
    TaskStats stats;
};

struct Pick {
    TaskId task;
    int source_core;
};

struct KindChangeOutcome {
    /// Task was taken off the core and put on the local Avx queue.
    bool descheduled = false;
    /// AVX core that must receive a preemption IPI.
    std::optional<int> preempt_core;
};

/// Deadline scheduler with per-core triples of run queues (scalar / AVX /
/// untyped), modelled on a MuQSS-style virtual-deadline design.
///
/// Under Baseline every core may take any task and no penalty applies, which
/// makes the per-core queues behave like one global EDF queue. Under
/// CoreSpecialization scalar cores never see the Avx queues and AVX cores see
/// Scalar tasks only through `scalar_penalty`.
class Scheduler {
public:
    explicit Scheduler(SchedParams params);

    TaskId add_task(const TaskSpec& spec);

    const SchedParams& params() const { return params_; }
    std::size_t task_count() const { return tasks_.size(); }
    Task& task(TaskId id) { return tasks_[static_cast<std::size_t>(id)]; }
    const Task& task(TaskId id) const { return tasks_[static_cast<std::size_t>(id)]; }
    const std::vector<Task>& tasks() const { return tasks_; }

    SimTime compute_deadline(const Task& task, SimTime virtual_now) const;
    std::vector<TaskKind> eligible_queues(int core) const;

    /// Deadline `core` would use when comparing `task` (penalty included).
    SimTime effective_deadline(int core, const Task& task) const;

    /// Task arrival: fresh deadline and slice, then onto `core`'s queue.
    void admit(TaskId id, int core, SimTime now);

    /// Puts a runnable task on `core`'s queue matching its kind. The deadline
    /// is left untouched.
    void enqueue(TaskId id, int core, SimTime now);

    /// Selects the eligible task with the minimal effective deadline across all
    /// cores' queues, removes it and marks it running on `core`. Ties prefer
    /// the local queue, then lower core id, then lower task id. A task taken
    /// from another core counts as a migration.
    std::optional<Pick> pick_next(int core, SimTime now);

    /// Removes the running task from `core` without enqueuing it.
    TaskId stop_running(int core);

    /// with_avx()/without_avx() on the task running on `core`. Throws
    /// std::invalid_argument for Untyped.
    KindChangeOutcome set_task_kind(TaskId id, TaskKind new_kind, int core, SimTime now);

    /// Delivery of a preemption IPI. Returns the preempted task (re-queued on
    /// the core's Scalar queue with its deadline intact), or nullopt if the IPI
    /// is stale.
    std::optional<TaskId> on_preempt(int core, SimTime now);

    /// Quantum expired: refresh deadline and slice, re-queue locally.
    TaskId on_quantum_expiry(int core, SimTime now);

    void mark_finished(int core);

    /// AVX core that should be preempted in favour of queued Avx/Untyped work:
    /// one running a Scalar task with no IPI already in flight, choosing the
    /// latest running deadline, then the lowest core id. Marks the IPI as in
    /// flight.
    std::optional<int> claim_preempt_target();

    /// True when queued Avx/Untyped work outnumbers IPIs in flight while some
    /// AVX core runs a Scalar task.
    bool preemption_needed() const;

    std::optional<TaskId> running(int core) const { return running_[static_cast<std::size_t>(core)]; }
    bool preempt_in_flight(int core) const { return preempt_in_flight_[static_cast<std::size_t>(core)]; }
    std::size_t queued_count() const { return queued_total_; }
    std::size_t queued_count(TaskKind kind) const { return queued_by_kind_[static_cast<std::size_t>(kind)]; }
    std::size_t queue_size(int core, TaskKind kind) const;

    /// Every task is in exactly one place. Returns a description of the first
    /// violation, or an empty string.
    std::string audit() const;

private:
    using QueueKey = std::pair<std::int64_t, TaskId>; // (deadline ps, id)
    using Queue = std::set<QueueKey>;

    Queue& queue(int core, TaskKind kind);
    const Queue& queue(int core, TaskKind kind) const;
    void remove_from_queue(Task& t);

    SchedParams params_;
    std::vector<bool> avx_core_;
    std::vector<Task> tasks_;
    std::vector<std::array<Queue, 3>> queues_;
    std::vector<std::optional<TaskId>> running_;
    std::vector<bool> preempt_in_flight_;
    std::size_t queued_total_ = 0;
    std::array<std::size_t, 3> queued_by_kind_{};
};

} // namespace avxsim

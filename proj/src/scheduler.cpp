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
#include "avxsim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "avxsim/error.hpp"

namespace avxsim {

namespace {
constexpr std::size_t idx(TaskKind k) { return static_cast<std::size_t>(k); }
} // namespace

std::string_view to_string(Policy policy) {
    switch (policy) {
    case Policy::Baseline: return "baseline";
    case Policy::CoreSpecialization: return "core_specialization";
    }
    return "?";
}

std::optional<Policy> parse_policy(std::string_view text) {
    if (text == "baseline") return Policy::Baseline;
    if (text == "core_specialization") return Policy::CoreSpecialization;
    return std::nullopt;
}

bool SchedParams::is_avx_core(int core) const {
    return std::find(avx_core_ids.begin(), avx_core_ids.end(), core) != avx_core_ids.end();
}

void SchedParams::validate() const {
    if (n_cores < 1) throw ConfigError("n_cores", "must be at least 1");
    for (std::size_t i = 0; i < avx_core_ids.size(); ++i) {
        const int c = avx_core_ids[i];
        const std::string field = "avx_core_ids[" + std::to_string(i) + "]";
        if (c < 0 || c >= n_cores)
            throw ConfigError(field, "core " + std::to_string(c) + " outside [0, " +
                                         std::to_string(n_cores) + ")");
        if (std::count(avx_core_ids.begin(), avx_core_ids.end(), c) > 1)
            throw ConfigError(field, "core " + std::to_string(c) + " listed twice");
    }
    if (policy == Policy::CoreSpecialization && avx_core_ids.empty())
        throw ConfigError("avx_core_ids", "core specialization needs at least one AVX core");
    if (rr_interval <= SimTime{}) throw ConfigError("rr_interval", "must be positive");
    if (scalar_penalty <= SimTime{}) throw ConfigError("scalar_penalty", "must be positive");
    if (kind_change_cost < SimTime{}) throw ConfigError("kind_change_cost", "must not be negative");
    if (migration_cost < SimTime{}) throw ConfigError("migration_cost", "must not be negative");
    if (preempt_cost < SimTime{}) throw ConfigError("preempt_cost", "must not be negative");
}

Scheduler::Scheduler(SchedParams params)
    : params_(std::move(params)),
      avx_core_(static_cast<std::size_t>(params_.n_cores), false),
      queues_(static_cast<std::size_t>(params_.n_cores)),
      running_(static_cast<std::size_t>(params_.n_cores)),
      preempt_in_flight_(static_cast<std::size_t>(params_.n_cores), false) {
    params_.validate();
    for (int c : params_.avx_core_ids) avx_core_[static_cast<std::size_t>(c)] = true;
}

TaskId Scheduler::add_task(const TaskSpec& spec) {
    if (!spec.program) throw std::invalid_argument("task '" + spec.name + "' has no program");
    if (!(spec.priority_ratio >= 1.0))
        throw std::invalid_argument("task '" + spec.name + "': priority_ratio must be >= 1");
    Task t;
    t.id = static_cast<TaskId>(tasks_.size());
    t.name = spec.name;
    t.priority_ratio = spec.priority_ratio;
    t.program = spec.program;
    tasks_.push_back(std::move(t));
    return tasks_.back().id;
}

SimTime Scheduler::compute_deadline(const Task& task, SimTime virtual_now) const {
    const double slice_ps = static_cast<double>(params_.rr_interval.ps()) * task.priority_ratio;
    return virtual_now + SimTime::from_ps(std::llround(slice_ps));
}

std::vector<TaskKind> Scheduler::eligible_queues(int core) const {
    if (params_.policy == Policy::Baseline)
        return {TaskKind::Scalar, TaskKind::Avx, TaskKind::Untyped};
    if (avx_core_[static_cast<std::size_t>(core)])
        return {TaskKind::Avx, TaskKind::Untyped, TaskKind::Scalar};
    return {TaskKind::Scalar, TaskKind::Untyped};
}

SimTime Scheduler::effective_deadline(int core, const Task& task) const {
    if (params_.policy == Policy::CoreSpecialization && avx_core_[static_cast<std::size_t>(core)] &&
        task.kind == TaskKind::Scalar)
        return task.deadline + params_.scalar_penalty;
    return task.deadline;
}

Scheduler::Queue& Scheduler::queue(int core, TaskKind kind) {
    return queues_[static_cast<std::size_t>(core)][idx(kind)];
}

const Scheduler::Queue& Scheduler::queue(int core, TaskKind kind) const {
    return queues_[static_cast<std::size_t>(core)][idx(kind)];
}

std::size_t Scheduler::queue_size(int core, TaskKind kind) const { return queue(core, kind).size(); }

void Scheduler::admit(TaskId id, int core, SimTime now) {
    Task& t = task(id);
    t.deadline = compute_deadline(t, now);
    t.slice_left = params_.rr_interval;
    enqueue(id, core, now);
}

void Scheduler::enqueue(TaskId id, int core, SimTime now) {
    Task& t = task(id);
    if (t.state == TaskState::Queued || t.state == TaskState::Running || t.state == TaskState::Finished)
        throw InternalInconsistencyError("enqueue of task " + t.name + " in state " +
                                         std::to_string(static_cast<int>(t.state)));
    t.state = TaskState::Queued;
    t.core = core;
    t.enqueued_at = now;
    queue(core, t.kind).insert({t.deadline.ps(), id});
    ++queued_total_;
    ++queued_by_kind_[idx(t.kind)];
}

void Scheduler::remove_from_queue(Task& t) {
    const auto erased = queue(t.core, t.kind).erase({t.deadline.ps(), t.id});
    if (erased != 1) throw InternalInconsistencyError("task " + t.name + " missing from its queue");
    --queued_total_;
    --queued_by_kind_[idx(t.kind)];
}

std::optional<Pick> Scheduler::pick_next(int core, SimTime now) {
    if (running_[static_cast<std::size_t>(core)])
        throw InternalInconsistencyError("pick_next on busy core " + std::to_string(core));
    if (queued_total_ == 0) return std::nullopt;

    // (effective deadline, remote?, core, task)
    std::optional<std::tuple<std::int64_t, int, int, TaskId>> best;
    for (TaskKind kind : eligible_queues(core)) {
        if (queued_by_kind_[idx(kind)] == 0) continue;
        for (int src = 0; src < params_.n_cores; ++src) {
            const Queue& q = queue(src, kind);
            if (q.empty()) continue;
            const Task& cand = task(q.begin()->second);
            auto key = std::make_tuple(effective_deadline(core, cand).ps(), src == core ? 0 : 1, src, cand.id);
            if (!best || key < *best) best = key;
        }
    }
    if (!best) return std::nullopt;

    const int src = std::get<2>(*best);
    Task& t = task(std::get<3>(*best));
    remove_from_queue(t);
    const SimTime waited = now - t.enqueued_at;
    t.stats.total_wait += waited;
    t.stats.max_wait = std::max(t.stats.max_wait, waited);
    ++t.stats.dispatches;
    if (src != core) ++t.stats.migrations;
    t.state = TaskState::Running;
    t.core = core;
    running_[static_cast<std::size_t>(core)] = t.id;
    return Pick{t.id, src};
}

TaskId Scheduler::stop_running(int core) {
    auto& slot = running_[static_cast<std::size_t>(core)];
    if (!slot) throw InternalInconsistencyError("stop_running on idle core " + std::to_string(core));
    const TaskId id = *slot;
    slot.reset();
    task(id).state = TaskState::Pending;
    return id;
}

KindChangeOutcome Scheduler::set_task_kind(TaskId id, TaskKind new_kind, int core, SimTime now) {
    if (new_kind == TaskKind::Untyped)
        throw std::invalid_argument("set_task_kind: tasks cannot return to Untyped");
    if (running_[static_cast<std::size_t>(core)] != id)
        throw InternalInconsistencyError("set_task_kind: task not running on core " + std::to_string(core));
    Task& t = task(id);
    t.kind = new_kind;
    ++t.stats.kind_changes;

    KindChangeOutcome out;
    if (params_.policy == Policy::Baseline) return out;
    if (new_kind == TaskKind::Avx && !avx_core_[static_cast<std::size_t>(core)]) {
        stop_running(core);
        enqueue(id, core, now);
        out.descheduled = true;
        out.preempt_core = claim_preempt_target();
    }
    return out;
}

std::optional<TaskId> Scheduler::on_preempt(int core, SimTime now) {
    preempt_in_flight_[static_cast<std::size_t>(core)] = false;
    const auto r = running_[static_cast<std::size_t>(core)];
    if (params_.policy != Policy::CoreSpecialization || !avx_core_[static_cast<std::size_t>(core)] || !r ||
        task(*r).kind != TaskKind::Scalar)
        return std::nullopt;
    stop_running(core);
    enqueue(*r, core, now);
    ++task(*r).stats.preemptions;
    return r;
}

TaskId Scheduler::on_quantum_expiry(int core, SimTime now) {
    const TaskId id = stop_running(core);
    Task& t = task(id);
    t.deadline = compute_deadline(t, now);
    t.slice_left = params_.rr_interval;
    enqueue(id, core, now);
    return id;
}

void Scheduler::mark_finished(int core) {
    const TaskId id = stop_running(core);
    task(id).state = TaskState::Finished;
}

std::optional<int> Scheduler::claim_preempt_target() {
    if (params_.policy != Policy::CoreSpecialization) return std::nullopt;
    std::optional<int> best;
    for (int c : params_.avx_core_ids) {
        const auto r = running_[static_cast<std::size_t>(c)];
        if (!r || preempt_in_flight_[static_cast<std::size_t>(c)] || task(*r).kind != TaskKind::Scalar) continue;
        if (!best) {
            best = c;
            continue;
        }
        const SimTime dl = task(*r).deadline;
        const SimTime best_dl = task(*running_[static_cast<std::size_t>(*best)]).deadline;
        if (dl > best_dl || (dl == best_dl && c < *best)) best = c;
    }
    if (best) preempt_in_flight_[static_cast<std::size_t>(*best)] = true;
    return best;
}

bool Scheduler::preemption_needed() const {
    if (params_.policy != Policy::CoreSpecialization) return false;
    const std::size_t waiting = queued_by_kind_[idx(TaskKind::Avx)] + queued_by_kind_[idx(TaskKind::Untyped)];
    if (waiting == 0) return false;
    std::size_t in_flight = 0;
    bool candidate = false;
    for (int c : params_.avx_core_ids) {
        const auto uc = static_cast<std::size_t>(c);
        if (preempt_in_flight_[uc]) {
            ++in_flight;
            continue;
        }
        if (running_[uc] && task(*running_[uc]).kind == TaskKind::Scalar) candidate = true;
    }
    return candidate && waiting > in_flight;
}

std::string Scheduler::audit() const {
    std::vector<int> seen(tasks_.size(), 0);
    for (int c = 0; c < params_.n_cores; ++c) {
        for (TaskKind k : {TaskKind::Scalar, TaskKind::Avx, TaskKind::Untyped}) {
            for (const auto& [dl, id] : queue(c, k)) {
                const Task& t = task(id);
                if (t.state != TaskState::Queued || t.core != c || t.kind != k || t.deadline.ps() != dl)
                    return "task " + t.name + " queued on core " + std::to_string(c) + " with stale bookkeeping";
                ++seen[static_cast<std::size_t>(id)];
            }
        }
        if (const auto r = running_[static_cast<std::size_t>(c)]) {
            const Task& t = task(*r);
            if (t.state != TaskState::Running || t.core != c)
                return "task " + t.name + " running on core " + std::to_string(c) + " with stale bookkeeping";
            ++seen[static_cast<std::size_t>(*r)];
        }
    }
    for (const Task& t : tasks_) {
        const int n = seen[static_cast<std::size_t>(t.id)];
        const bool placed = t.state == TaskState::Queued || t.state == TaskState::Running;
        if (placed && n != 1) return "task " + t.name + " appears " + std::to_string(n) + " times";
        if (!placed && n != 0) return "task " + t.name + " is not runnable but appears in a queue";
    }
    return {};
}

} // namespace avxsim

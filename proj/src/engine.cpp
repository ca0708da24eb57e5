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
#include "avxsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "avxsim/error.hpp"

namespace avxsim {

namespace {

constexpr std::string_view kOverheadLabel = "[sched]";
constexpr int kAdvanceGuard = 1'000'000;

} // namespace

void SimConfig::validate() const {
    try {
        cpu.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("cpu." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    try {
        sched.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("sched." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
    }
    if (run.horizon <= SimTime{}) throw ConfigError("run.horizon", "must be positive");
    if (run.warmup < SimTime{}) throw ConfigError("run.warmup", "must not be negative");
    if (run.warmup >= run.horizon) throw ConfigError("run.warmup", "must be shorter than run.horizon");
}

void check_penalty_soundness(const SimConfig& config, double max_ratio) {
    if (config.sched.policy != Policy::CoreSpecialization) return;
    // Deadlines never exceed the horizon plus one weighted slice.
    const double bound_ps = static_cast<double>(config.run.horizon.ps()) +
                            static_cast<double>(config.sched.rr_interval.ps()) * max_ratio;
    if (static_cast<double>(config.sched.scalar_penalty.ps()) <= bound_ps)
        throw ConfigError("sched.scalar_penalty",
                          "must exceed the largest reachable deadline (" +
                              SimTime::from_ps(static_cast<std::int64_t>(bound_ps)).to_ns_string() + " ns)");
}

std::string format_trace_line(const TraceRecord& rec) {
    std::string line = rec.at.to_ns_string();
    line += ' ';
    line += rec.core < 0 ? std::string("-") : std::to_string(rec.core);
    line += ' ';
    line += rec.event;
    line += ' ';
    line += rec.task.empty() ? std::string_view("-") : rec.task;
    line += ' ';
    line += rec.detail.empty() ? std::string("-") : rec.detail;
    return line;
}

Simulation::Simulation(SimConfig config, const std::vector<TaskSpec>& tasks)
    : config_(std::move(config)), specs_(tasks), sched_(config_.sched) {
    config_.validate();
    if (specs_.empty()) throw Error("empty workload: no tasks to simulate");

    double max_ratio = 1.0;
    for (const auto& spec : specs_) {
        if (!spec.program) throw Error("task '" + spec.name + "' has no program");
        if (spec.program->loop && spec.program->total_cycles() <= 0)
            throw Error("task '" + spec.name + "': looping program without any compute cycles");
        max_ratio = std::max(max_ratio, spec.priority_ratio);
        sched_.add_task(spec);
    }
    check_penalty_soundness(config_, max_ratio);
    cores_.reserve(static_cast<std::size_t>(config_.sched.n_cores));
    for (int c = 0; c < config_.sched.n_cores; ++c) cores_.emplace_back(c, config_.cpu);
}

void Simulation::push(SimTime at, EventType type, int core, int task, std::uint64_t epoch) {
    events_.push(Event{at, seq_++, type, core, task, epoch});
}

void Simulation::emit(int core, std::string_view event, const Task* task, std::string detail) {
    if (!tracing()) return;
    TraceRecord rec{now_, core, event, task ? std::string_view(task->name) : std::string_view{}, std::move(detail)};
    if (trace_) *trace_ << format_trace_line(rec) << '\n';
    if (observer_) observer_->on_record(rec);
}

SimReport Simulation::run() {
    for (std::size_t i = 0; i < specs_.size(); ++i)
        push(specs_[i].arrival, EventType::TaskArrival, -1, static_cast<int>(i), 0);
    if (config_.run.warmup > SimTime{})
        push(config_.run.warmup, EventType::WarmupEnd, -1, -1, 0);
    else
        start_measuring();

    bool first = true;
    while (!events_.empty()) {
        const Event ev = events_.top();
        if (ev.at > config_.run.horizon) break;
        if (!first && ev.at != now_ && observer_) observer_->on_instant(*this, now_);
        first = false;
        events_.pop();
        now_ = ev.at;
        handle(ev);
        rebalance();
        if (finished_ == specs_.size()) {
            drained_ = true;
            break;
        }
    }
    if (observer_ && !first) observer_->on_instant(*this, now_);

    const SimTime end = drained_ ? now_ : config_.run.horizon;
    now_ = end;
    for (int c = 0; c < config_.sched.n_cores; ++c) accrue(c, false);
    if (!measuring_) start_measuring();
    return build_report(end);
}

void Simulation::handle(const Event& ev) {
    switch (ev.type) {
    case EventType::TaskArrival: {
        const TaskId id = ev.task;
        const int home = id % config_.sched.n_cores;
        sched_.admit(id, home, now_);
        emit(home, "arrive", &sched_.task(id));
        break;
    }
    case EventType::SegmentBoundary: {
        CoreState& cs = cores_[static_cast<std::size_t>(ev.core)];
        if (ev.epoch != cs.piece_epoch || cs.piece == Piece::None) return;
        accrue(ev.core, true);
        cs.piece = Piece::None;
        ++cs.piece_epoch;
        advance(ev.core);
        break;
    }
    case EventType::LicenseGrant: {
        CoreState& cs = cores_[static_cast<std::size_t>(ev.core)];
        if (ev.epoch != cs.license.grant_epoch() || !cs.license.pending()) return;
        accrue(ev.core, false);
        cs.license.on_grant(now_);
        emit(ev.core, "grant", nullptr, "level=" + std::string(to_string(cs.license.granted())));
        restart_piece(ev.core);
        break;
    }
    case EventType::RevertTimer: {
        CoreState& cs = cores_[static_cast<std::size_t>(ev.core)];
        if (ev.epoch != cs.license.revert_epoch() || !cs.license.revert_at()) return;
        accrue(ev.core, false);
        const FrequencyLevel from = cs.license.granted();
        cs.license.on_revert(now_);
        emit(ev.core, "revert", nullptr, "from=" + std::string(to_string(from)));
        restart_piece(ev.core);
        break;
    }
    case EventType::QuantumExpiry: {
        CoreState& cs = cores_[static_cast<std::size_t>(ev.core)];
        if (ev.epoch != cs.quantum_epoch) return;
        const auto r = sched_.running(ev.core);
        if (!r) return;
        accrue(ev.core, false);
        Task& t = sched_.task(*r);
        stop_task(ev.core, t);
        sched_.on_quantum_expiry(ev.core, now_);
        emit(ev.core, "expire", &t, "deadline=" + t.deadline.to_ns_string());
        advance(ev.core);
        break;
    }
    case EventType::Preempt: {
        const auto r = sched_.running(ev.core);
        if (r) accrue(ev.core, false);
        const auto victim = sched_.on_preempt(ev.core, now_);
        if (!victim) {
            emit(ev.core, "ipi_stale", nullptr);
            return;
        }
        Task& t = sched_.task(*victim);
        stop_task(ev.core, t);
        emit(ev.core, "preempt", &t);
        cores_[static_cast<std::size_t>(ev.core)].switch_cost_pending = true;
        advance(ev.core);
        break;
    }
    case EventType::WarmupEnd:
        for (int c = 0; c < config_.sched.n_cores; ++c) accrue(c, false);
        start_measuring();
        emit(-1, "warmup_end", nullptr);
        break;
    }
}

void Simulation::start_measuring() {
    measuring_ = true;
    for (auto& cs : cores_) cs.snapshot = cs.license.counters();
    attribution_.clear();
    units_ = 0;
    measured_kind_changes_ = 0;
    for (std::size_t i = 0; i < sched_.task_count(); ++i) sched_.task(static_cast<TaskId>(i)).stats.units = 0;
}

void Simulation::rebalance() {
    if (sched_.queued_count() > 0) {
        for (int c = 0; c < config_.sched.n_cores && sched_.queued_count() > 0; ++c)
            if (!sched_.running(c)) advance(c);
    }
    while (sched_.preemption_needed()) {
        const auto target = sched_.claim_preempt_target();
        if (!target) break;
        push(now_, EventType::Preempt, *target, -1, 0);
        emit(*target, "ipi", nullptr);
    }
}

void Simulation::dispatch(int core, const Pick& pick) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    Task& t = sched_.task(pick.task);
    cs.dispatch_time = now_;
    ++cs.quantum_epoch;
    if (pick.source_core != core) t.pending_overhead_time += config_.sched.migration_cost;
    if (cs.switch_cost_pending) {
        t.pending_overhead_time += config_.sched.preempt_cost;
        cs.switch_cost_pending = false;
    }
    if (t.slice_left <= SimTime{}) t.slice_left = config_.sched.rr_interval;
    push(now_ + t.slice_left, EventType::QuantumExpiry, core, t.id, cs.quantum_epoch);
    if (tracing()) {
        std::string detail = "kind=" + std::string(to_string(t.kind));
        if (pick.source_core != core) detail += " from=" + std::to_string(pick.source_core);
        emit(core, "run", &t, std::move(detail));
    }
}

void Simulation::stop_task(int core, Task& t) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    if (cs.demand_active) end_demand(core);
    cs.piece = Piece::None;
    ++cs.piece_epoch;
    ++cs.quantum_epoch;
    t.slice_left -= now_ - cs.dispatch_time;
}

void Simulation::begin_demand(int core, FrequencyLevel level) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    const auto detect = cs.license.on_demand_start(level, now_);
    cs.demand_active = true;
    if (detect) cs.detect_left = static_cast<double>(*detect);
    if (tracing())
        emit(core, "demand_start", sched_.running(core) ? &sched_.task(*sched_.running(core)) : nullptr,
             "level=" + std::string(to_string(level)) + (detect ? " detect=" + std::to_string(*detect) : ""));
}

void Simulation::end_demand(int core) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    cs.license.on_demand_end(now_);
    cs.demand_active = false;
    cs.detect_left.reset();
    if (const auto at = cs.license.revert_at())
        push(*at, EventType::RevertTimer, core, -1, cs.license.revert_epoch());
    if (tracing()) {
        const auto r = sched_.running(core);
        const auto at = cs.license.revert_at();
        emit(core, "demand_end", r ? &sched_.task(*r) : nullptr,
             at ? "revert_at=" + at->to_ns_string() : std::string{});
    }
}

void Simulation::raise_request(int core) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    cs.detect_left.reset();
    const std::uint64_t before = cs.license.grant_epoch();
    const SimTime grant_at = cs.license.raise_request(now_);
    if (cs.license.grant_epoch() != before)
        push(grant_at, EventType::LicenseGrant, core, -1, cs.license.grant_epoch());
    emit(core, "request", nullptr,
         "level=" + std::string(to_string(cs.license.pending()->target)) + " grant_at=" + grant_at.to_ns_string());
}

void Simulation::restart_piece(int core) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    if (cs.piece == Piece::None) return;
    cs.piece = Piece::None;
    ++cs.piece_epoch;
    advance(core);
}

void Simulation::start_piece(int core, Task& t, Piece kind, double remaining) {
    (void)t;
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    const double ghz = cs.license.effective_frequency();
    double target = remaining;
    cs.piece_ends_entry = true;
    cs.piece_ends_detection = false;
    if (kind == Piece::Compute && cs.detect_left) {
        if (*cs.detect_left < remaining) {
            target = *cs.detect_left;
            cs.piece_ends_entry = false;
        }
        cs.piece_ends_detection = *cs.detect_left <= remaining;
    }
    cs.piece = kind;
    cs.piece_start = now_;
    cs.piece_ghz = ghz;
    cs.piece_target = target;
    ++cs.piece_epoch;
    push(now_ + duration_for(target, ghz), EventType::SegmentBoundary, core, -1, cs.piece_epoch);
}

void Simulation::accrue(int core, bool exact_boundary) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    if (cs.piece == Piece::None) return;
    const auto r = sched_.running(core);
    if (!r) throw InternalInconsistencyError("piece active on idle core " + std::to_string(core));
    Task& t = sched_.task(*r);

    double d = exact_boundary ? cs.piece_target
                              : std::min(cs.piece_target, cycles_in(now_ - cs.piece_start, cs.piece_ghz));
    const bool reached = exact_boundary || d >= cs.piece_target;
    if (reached) d = cs.piece_target;

    std::int64_t inc = 0;
    std::string_view label = kOverheadLabel;
    if (cs.piece == Piece::Overhead) {
        t.overhead_done += d;
        std::int64_t now_tallied = static_cast<std::int64_t>(std::floor(t.overhead_done));
        if (reached) {
            t.overhead_done = static_cast<double>(t.overhead_total);
            now_tallied = t.overhead_total;
        }
        now_tallied = std::min(now_tallied, t.overhead_total);
        inc = now_tallied - t.overhead_tallied;
        t.overhead_tallied = now_tallied;
        t.stats.overhead_cycles += inc;
    } else {
        const auto& cmp = std::get<Compute>(t.program->entries[t.pc]);
        label = cmp.effective_label();
        t.entry_done += d;
        std::int64_t now_tallied = static_cast<std::int64_t>(std::floor(t.entry_done));
        if (reached && cs.piece_ends_entry) {
            t.entry_done = static_cast<double>(cmp.cycles);
            now_tallied = cmp.cycles;
        }
        now_tallied = std::min(now_tallied, cmp.cycles - (reached && cs.piece_ends_entry ? 0 : 1));
        now_tallied = std::max(now_tallied, t.entry_tallied);
        inc = now_tallied - t.entry_tallied;
        t.entry_tallied = now_tallied;
        if (cs.detect_left) {
            *cs.detect_left -= d;
            if (reached && cs.piece_ends_detection) *cs.detect_left = 0.0;
            if (*cs.detect_left < 0.0) *cs.detect_left = 0.0;
        }
    }
    cs.piece_target -= d;
    cs.piece_start = now_;

    if (inc > 0) {
        const bool throttled = cs.license.pending().has_value();
        cs.license.tally(inc);
        t.stats.executed_cycles += inc;
        if (throttled) attribution_[{t.id, std::string(label)}] += inc;
    }
}

void Simulation::advance(int core) {
    CoreState& cs = cores_[static_cast<std::size_t>(core)];
    if (cs.piece != Piece::None) return;
    for (int guard = 0;; ++guard) {
        if (guard > kAdvanceGuard)
            throw InternalInconsistencyError("core " + std::to_string(core) + " made no progress");
        const auto r = sched_.running(core);
        if (!r) {
            const auto pick = sched_.pick_next(core, now_);
            if (!pick) return;
            dispatch(core, *pick);
            continue;
        }
        Task& t = sched_.task(*r);

        if (cs.detect_left && *cs.detect_left <= 0.0) raise_request(core);

        if (t.pending_overhead_time > SimTime{}) {
            const double cyc = cycles_in(t.pending_overhead_time, cs.license.effective_frequency());
            t.overhead_total += static_cast<std::int64_t>(std::llround(cyc));
            t.pending_overhead_time = SimTime{};
        }
        if (t.overhead_tallied < t.overhead_total) {
            start_piece(core, t, Piece::Overhead, static_cast<double>(t.overhead_total) - t.overhead_done);
            return;
        }
        t.overhead_total = 0;
        t.overhead_tallied = 0;
        t.overhead_done = 0.0;

        const Program& prog = *t.program;
        if (t.pc >= prog.entries.size()) {
            if (prog.loop && !prog.entries.empty()) {
                t.pc = 0;
                continue;
            }
            stop_task(core, t);
            sched_.mark_finished(core);
            ++finished_;
            emit(core, "finish", &t);
            continue;
        }

        const ProgramEntry& entry = prog.entries[t.pc];
        if (const auto* cmp = std::get_if<Compute>(&entry)) {
            if (cmp->cycles <= 0) {
                if (zero_cycle_skips_++ == 0) emit(core, "warn", &t, "zero-cycle segment skipped");
                ++t.pc;
                continue;
            }
            if (t.entry_tallied >= cmp->cycles) {
                if (cs.demand_active) end_demand(core);
                ++t.pc;
                t.entry_done = 0.0;
                t.entry_tallied = 0;
                continue;
            }
            if (const auto level = demand_of(cmp->kind); level && !cs.demand_active) {
                begin_demand(core, *level);
                if (cs.detect_left && *cs.detect_left <= 0.0) continue;
            }
            start_piece(core, t, Piece::Compute, static_cast<double>(cmp->cycles) - t.entry_done);
            return;
        }
        if (const auto* sk = std::get_if<SetKind>(&entry)) {
            if (!t.kind_cost_paid) {
                t.kind_cost_paid = true;
                t.pending_overhead_time += config_.sched.kind_change_cost;
                continue;
            }
            t.kind_cost_paid = false;
            ++t.pc;
            if (measuring_) ++measured_kind_changes_;
            const TaskKind from = t.kind;
            const auto out = sched_.set_task_kind(t.id, sk->kind, core, now_);
            emit(core, "setkind", &t,
                 std::string(to_string(from)) + "->" + std::string(to_string(sk->kind)) +
                     (out.descheduled ? " putback" : ""));
            if (out.descheduled) {
                // The scheduler already moved the task to the local Avx queue.
                if (cs.demand_active) end_demand(core);
                ++cs.quantum_epoch;
                t.slice_left -= now_ - cs.dispatch_time;
            }
            if (out.preempt_core) {
                push(now_, EventType::Preempt, *out.preempt_core, -1, 0);
                emit(*out.preempt_core, "ipi", nullptr);
            }
            continue;
        }
        // EndUnit
        ++t.pc;
        if (measuring_) {
            ++units_;
            ++t.stats.units;
        }
    }
}

SimReport Simulation::build_report(SimTime end) const {
    SimReport rep;
    rep.policy = std::string(to_string(config_.sched.policy));
    rep.seed = config_.run.seed;
    rep.end_time = end;
    rep.warmup = std::min(config_.run.warmup, end);
    rep.measured_wall = end - rep.warmup;
    rep.drained = drained_;
    rep.units = units_;
    rep.kind_changes = measured_kind_changes_;
    const double wall_s = rep.measured_wall.seconds();
    if (wall_s > 0.0) {
        rep.units_per_sec = static_cast<double>(units_) / wall_s;
        rep.kind_changes_per_sec = static_cast<double>(measured_kind_changes_) / wall_s;
        rep.kind_changes_per_core_sec = rep.kind_changes_per_sec / config_.sched.n_cores;
    }

    double weighted = 0.0;
    std::int64_t cycles = 0;
    for (int c = 0; c < config_.sched.n_cores; ++c) {
        const CoreState& cs = cores_[static_cast<std::size_t>(c)];
        CoreReport cr;
        cr.core = c;
        cr.avx_core = config_.sched.is_avx_core(c);
        cr.counters = cs.license.counters() - cs.snapshot;
        cr.mean_freq_ghz = cr.counters.mean_frequency_ghz(config_.cpu);
        weighted += cr.counters.frequency_weighted_cycles(config_.cpu);
        cycles += cr.counters.total();
        rep.total_core_cycles += cs.license.counters().total();
        rep.cores.push_back(cr);
    }
    rep.mean_freq_ghz = cycles > 0 ? weighted / static_cast<double>(cycles) : 0.0;

    for (const Task& t : sched_.tasks()) {
        TaskReport tr;
        tr.name = t.name;
        tr.final_kind = std::string(to_string(t.kind));
        tr.units = t.stats.units;
        tr.migrations = t.stats.migrations;
        tr.kind_changes = t.stats.kind_changes;
        tr.preemptions = t.stats.preemptions;
        tr.dispatches = t.stats.dispatches;
        tr.executed_cycles = t.stats.executed_cycles;
        tr.overhead_cycles = t.stats.overhead_cycles;
        tr.max_wait = t.stats.max_wait;
        tr.total_wait = t.stats.total_wait;
        rep.total_task_cycles += t.stats.executed_cycles;
        rep.tasks.push_back(std::move(tr));
    }
    for (const auto& [key, n] : attribution_) {
        if (n == 0) continue;
        rep.attribution.push_back({sched_.task(key.first).name, key.second, n});
    }
    std::sort(rep.attribution.begin(), rep.attribution.end(), [](const auto& a, const auto& b) {
        return std::tie(a.task, a.label) < std::tie(b.task, b.label);
    });
    rep.zero_cycle_segments_skipped = zero_cycle_skips_;
    if (zero_cycle_skips_ > 0)
        rep.warnings.push_back(std::to_string(zero_cycle_skips_) + " zero-cycle segment(s) skipped");
    return rep;
}

SimReport run_simulation(const SimConfig& config, const std::vector<TaskSpec>& tasks, std::ostream* trace) {
    Simulation sim(config, tasks);
    sim.set_trace(trace);
    return sim.run();
}

} // namespace avxsim

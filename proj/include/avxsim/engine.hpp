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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "avxsim/freqmodel.hpp"
#include "avxsim/program.hpp"
#include "avxsim/report.hpp"
#include "avxsim/scheduler.hpp"
#include "avxsim/time.hpp"

namespace avxsim {

struct RunParams {
    SimTime horizon = SimTime::from_ms(1000);
    /// Work completing before this instant is not measured.
    SimTime warmup = SimTime::from_ms(50);
    std::uint64_t seed = 1;
};

struct SimConfig {
    CpuParams cpu;
    SchedParams sched;
    RunParams run;

    /// Throws ConfigError with a dotted field path.
    void validate() const;
};

struct TraceRecord {
    SimTime at;
    int core = -1;
    std::string_view event;
    std::string_view task; // empty: no task involved
    std::string detail;
};

/// Writes `<ns> <core> <event> <task> <detail>`; "-" stands in for absent fields.
std::string format_trace_line(const TraceRecord& rec);

class Simulation;

class SimObserver {
public:
    virtual ~SimObserver() = default;
    virtual void on_record(const TraceRecord&) {}
    /// Called once per distinct timestamp, after every event at that instant
    /// has been processed.
    virtual void on_instant(const Simulation&, SimTime) {}
};

/// One discrete-event simulation instance. Single threaded; instances share
/// nothing but the immutable programs they were given.
class Simulation {
public:
    Simulation(SimConfig config, const std::vector<TaskSpec>& tasks);

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void set_trace(std::ostream* out) { trace_ = out; }
    void set_observer(SimObserver* obs) { observer_ = obs; }

    SimReport run();

    // Read-only views for observers and tests.
    SimTime now() const { return now_; }
    const SimConfig& config() const { return config_; }
    const Scheduler& scheduler() const { return sched_; }
    const FrequencyLicense& license(int core) const { return cores_[static_cast<std::size_t>(core)].license; }
    /// True while an AVX-heavy compute segment executes on `core`.
    bool demand_active(int core) const { return cores_[static_cast<std::size_t>(core)].demand_active; }
    const std::vector<TaskSpec>& specs() const { return specs_; }

private:
    enum class EventType : std::uint8_t {
        TaskArrival,
        SegmentBoundary,
        LicenseGrant,
        RevertTimer,
        QuantumExpiry,
        Preempt,
        WarmupEnd,
    };

    struct Event {
        SimTime at;
        std::uint64_t seq;
        EventType type;
        int core;
        int task;
        std::uint64_t epoch;
        bool operator>(const Event& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };

    enum class Piece : std::uint8_t { None, Overhead, Compute };

    struct CoreState {
        explicit CoreState(int id, const CpuParams& cpu) : license(id, cpu) {}
        FrequencyLicense license;
        Piece piece = Piece::None;
        SimTime piece_start{};
        double piece_ghz = 0.0;
        double piece_target = 0.0; // cycles until this piece's boundary
        bool piece_ends_entry = false;
        bool piece_ends_detection = false;
        std::uint64_t piece_epoch = 0;
        bool demand_active = false;
        std::optional<double> detect_left;
        SimTime dispatch_time{};
        std::uint64_t quantum_epoch = 0;
        bool switch_cost_pending = false;
        LicenseCounters snapshot;
    };

    void push(SimTime at, EventType type, int core, int task, std::uint64_t epoch);
    void handle(const Event& ev);
    void rebalance();

    void advance(int core);
    void dispatch(int core, const Pick& pick);
    void stop_task(int core, Task& t);
    void start_piece(int core, Task& t, Piece kind, double remaining);
    void restart_piece(int core);
    void accrue(int core, bool exact_boundary);
    void begin_demand(int core, FrequencyLevel level);
    void end_demand(int core);
    void raise_request(int core);
    void start_measuring();

    bool tracing() const { return trace_ != nullptr || observer_ != nullptr; }
    void emit(int core, std::string_view event, const Task* task, std::string detail = {});

    SimReport build_report(SimTime end) const;

    SimConfig config_;
    std::vector<TaskSpec> specs_;
    Scheduler sched_;
    std::vector<CoreState> cores_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_ = 0;
    SimTime now_{};
    bool measuring_ = false;
    bool drained_ = false;
    std::size_t finished_ = 0;
    std::int64_t units_ = 0;
    std::int64_t measured_kind_changes_ = 0;
    std::int64_t zero_cycle_skips_ = 0;
    std::map<std::pair<TaskId, std::string>, std::int64_t> attribution_;
    std::ostream* trace_ = nullptr;
    SimObserver* observer_ = nullptr;
};

/// Throws ConfigError("sched.scalar_penalty") unless the penalty exceeds every
/// deadline reachable before the horizon for tasks up to `max_ratio`.
void check_penalty_soundness(const SimConfig& config, double max_ratio);

/// Convenience wrapper: construct, run, return the report.
SimReport run_simulation(const SimConfig& config, const std::vector<TaskSpec>& tasks,
                         std::ostream* trace = nullptr);

} // namespace avxsim

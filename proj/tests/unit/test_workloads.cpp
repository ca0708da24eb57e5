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

#include <filesystem>
#include <fstream>

#include "avxsim/engine.hpp"
#include "avxsim/error.hpp"
#include "avxsim/workloads.hpp"

using namespace avxsim;

namespace {

WebWorkloadParams small_web(SimdVariant v) {
    WebWorkloadParams p;
    p.simd_variant = v;
    p.n_connections = 24;
    p.requests_per_program = 4;
    return p;
}

bool same_tasks(const std::vector<TaskSpec>& a, const std::vector<TaskSpec>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || a[i].priority_ratio != b[i].priority_ratio || a[i].arrival != b[i].arrival ||
            !(*a[i].program == *b[i].program))
            return false;
    }
    return true;
}

SimConfig web_sim(Policy policy) {
    SimConfig c;
    c.sched.policy = policy;
    c.run.horizon = SimTime::from_ms(400);
    c.run.warmup = SimTime::from_ms(50);
    return c;
}

} // namespace

TEST_CASE("workloads: variant names and segment kinds") {
    for (SimdVariant v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
    CHECK_FALSE(parse_variant("neon").has_value());
    CHECK(crypto_segment_kind(SimdVariant::SSE4) == SegmentKind::ScalarDense);
    CHECK(crypto_segment_kind(SimdVariant::AVX2) == SegmentKind::AvxL1);
    CHECK(crypto_segment_kind(SimdVariant::AVX512) == SegmentKind::AvxL2);
}

TEST_CASE("workloads: web request structure") {
    const auto tasks = gen_web(small_web(SimdVariant::AVX512), 1);
    REQUIRE(tasks.size() == 24);
    CHECK(tasks[0].name == "conn0");
    const Program& p = *tasks[3].program;
    CHECK(p.loop);
    REQUIRE(p.entries.size() == 4 * 5);
    for (std::size_t r = 0; r < 4; ++r) {
        const auto* s1 = std::get_if<SetKind>(&p.entries[5 * r]);
        const auto* crypto = std::get_if<Compute>(&p.entries[5 * r + 1]);
        const auto* s2 = std::get_if<SetKind>(&p.entries[5 * r + 2]);
        const auto* scalar = std::get_if<Compute>(&p.entries[5 * r + 3]);
        REQUIRE(s1);
        REQUIRE(crypto);
        REQUIRE(s2);
        REQUIRE(scalar);
        CHECK(std::holds_alternative<EndUnit>(p.entries[5 * r + 4]));
        CHECK(s1->kind == TaskKind::Avx);
        CHECK(s2->kind == TaskKind::Scalar);
        CHECK(crypto->kind == SegmentKind::AvxL2);
        CHECK(crypto->label == "ssl");
        CHECK(scalar->label == "http+brotli");
        CHECK(scalar->kind == SegmentKind::ScalarDense);
        // Jitter stays within +-10 % and scales both halves alike.
        const double f = static_cast<double>(scalar->cycles) / 12'170'889.0;
        CHECK(f >= 0.9 - 1e-9);
        CHECK(f <= 1.1 + 1e-9);
        CHECK(static_cast<double>(crypto->cycles) / 48'226.0 == doctest::Approx(f).epsilon(1e-4));
    }
    CHECK(validate_program(p).empty());
}

TEST_CASE("workloads: web generator is seeded") {
    const auto a = gen_web(small_web(SimdVariant::AVX2), 5);
    const auto b = gen_web(small_web(SimdVariant::AVX2), 5);
    const auto c = gen_web(small_web(SimdVariant::AVX2), 6);
    CHECK(same_tasks(a, b));
    CHECK_FALSE(same_tasks(a, c));
}

TEST_CASE("workloads: request work does not depend on the policy") {
    // Policies only change timing: the same variant yields the same programs.
    const auto a = gen_web(small_web(SimdVariant::AVX512), 3);
    const auto b = gen_web(small_web(SimdVariant::AVX512), 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].program->total_cycles() == b[i].program->total_cycles());
}

TEST_CASE("workloads: web parameter validation") {
    WebWorkloadParams p;
    p.n_connections = 0;
    CHECK_THROWS_AS(gen_web(p, 1), Error);
    p = WebWorkloadParams{};
    p.jitter = 1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = WebWorkloadParams{};
    p.crypto_cycles[1] = 0;
    try {
        p.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "crypto_cycles.avx2");
    }
}

TEST_CASE("workloads: SSE4 never leaves L0") {
    const SimReport r = run_simulation(web_sim(Policy::Baseline), gen_web(WebWorkloadParams{.simd_variant = SimdVariant::SSE4}, 1));
    CHECK(r.mean_freq_ghz == doctest::Approx(2.8));
    CHECK(r.throttle_cycles() == 0);
    for (const auto& c : r.cores) CHECK(c.counters.lvl0 == c.counters.total());
}

TEST_CASE("workloads: baseline throughput falls with wider vectors") {
    double prev = 1e300;
    for (SimdVariant v : kAllVariants) {
        WebWorkloadParams p;
        p.simd_variant = v;
        const double tput = run_simulation(web_sim(Policy::Baseline), gen_web(p, 1)).units_per_sec;
        CHECK(tput < prev);
        prev = tput;
    }
}

TEST_CASE("workloads: microbench loop") {
    MicrobenchParams p;
    p.loop_cycles = 200'000;
    const auto tasks = gen_microbench(p, 1);
    REQUIRE(tasks.size() == 26);
    CHECK(tasks[25].name == "thread25");
    const Program& prog = *tasks[0].program;
    REQUIRE(prog.entries.size() == 5);
    CHECK(std::get<SetKind>(prog.entries[0]).kind == TaskKind::Avx);
    CHECK(std::get<Compute>(prog.entries[1]) == Compute{SegmentKind::ScalarDense, 10'000, "fake-avx"});
    CHECK(std::get<SetKind>(prog.entries[2]).kind == TaskKind::Scalar);
    CHECK(std::get<Compute>(prog.entries[3]) == Compute{SegmentKind::ScalarDense, 190'000, "loop"});
    CHECK(std::holds_alternative<EndUnit>(prog.entries[4]));
    CHECK(prog.loop);

    p.avx_fraction = 0.0;
    const Program& plain = *gen_microbench(p, 1)[0].program;
    CHECK(plain.entries.size() == 2);
    p.avx_fraction = 1.5;
    CHECK_THROWS_AS(gen_microbench(p, 1), ConfigError);
}

TEST_CASE("workloads: halving the loop doubles the kind-change rate") {
    SimConfig c;
    c.sched.policy = Policy::CoreSpecialization;
    c.run.horizon = SimTime::from_ms(300);
    c.run.warmup = SimTime::from_ms(20);
    MicrobenchParams p;
    p.loop_cycles = 400'000;
    const double r1 = run_simulation(c, gen_microbench(p, 1)).kind_changes_per_core_sec;
    p.loop_cycles = 200'000;
    const double r2 = run_simulation(c, gen_microbench(p, 1)).kind_changes_per_core_sec;
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("workloads: no marked section means no overhead") {
    SimConfig c;
    c.sched.policy = Policy::CoreSpecialization;
    c.run.horizon = SimTime::from_ms(200);
    c.run.warmup = SimTime::from_ms(20);
    MicrobenchParams p;
    p.avx_fraction = 0.0;
    p.loop_cycles = 100'000;
    const auto tasks = gen_microbench(p, 1);
    const SimReport a = run_simulation(c, tasks);
    const SimReport b = run_simulation(c, strip_kind_changes(tasks));
    CHECK(a.kind_changes == 0);
    CHECK(a.units == b.units);
}

TEST_CASE("workloads: strip_kind_changes removes only annotations") {
    const auto tasks = gen_web(small_web(SimdVariant::AVX512), 2);
    const auto stripped = strip_kind_changes(tasks);
    REQUIRE(stripped.size() == tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        CHECK(stripped[i].program->entries.size() == 3 * 4);
        CHECK(stripped[i].program->total_cycles() == tasks[i].program->total_cycles());
        for (const auto& e : stripped[i].program->entries) CHECK_FALSE(std::holds_alternative<SetKind>(e));
    }
}

TEST_CASE("trace: basic parse") {
    const auto w = parse_trace(R"(# two tasks
task a ratio=2 arrival=1500 loop
  setkind avx
  compute avx2demand 5000 ssl read   # label with a space
  setkind scalar
  compute scalar 100
  endunit
task b
  repeat 3
    compute avx1 10
    repeat 2
      endunit
    end
  end
)");
    REQUIRE(w.tasks.size() == 2);
    const TaskSpec& a = w.tasks[0];
    CHECK(a.name == "a");
    CHECK(a.priority_ratio == 2.0);
    CHECK(a.arrival == SimTime::from_ns(1500));
    CHECK(a.program->loop);
    REQUIRE(a.program->entries.size() == 5);
    CHECK(std::get<Compute>(a.program->entries[1]).label == "ssl read");
    const TaskSpec& b = w.tasks[1];
    CHECK_FALSE(b.program->loop);
    CHECK(b.program->entries.size() == 9);
    // b runs AVX-heavy work without an annotation.
    CHECK(w.warnings.size() == 3);
}

TEST_CASE("trace: a single compute line is one task with one segment") {
    const auto w = parse_trace("compute scalar 1000\n");
    REQUIRE(w.tasks.size() == 1);
    CHECK(w.tasks[0].name == "main");
    REQUIRE(w.tasks[0].program->entries.size() == 1);
    CHECK(std::get<Compute>(w.tasks[0].program->entries[0]).cycles == 1000);
}

TEST_CASE("trace: errors carry line numbers") {
    auto line_of = [](std::string_view text) {
        try {
            parse_trace(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("") > 0);
    CHECK(line_of("# only a comment\n") > 0);
    CHECK(line_of("task a\ncompute vector 10\n") == 2);
    CHECK(line_of("task a\ncompute scalar -5\n") == 2);
    CHECK(line_of("task a\ncompute scalar 5\ntask a\ncompute scalar 5\n") == 3);
    CHECK(line_of("task a\nrepeat 2\ncompute scalar 5\n") == 2);
    CHECK(line_of("task a\nend\n") == 2);
    CHECK(line_of("task a\n\nfrobnicate\n") == 3);
    CHECK(line_of("task a ratio=0.5\ncompute scalar 5\n") == 1);
    CHECK(line_of("task a\ntask b\ncompute scalar 5\n") == 1);
    CHECK(line_of("task a\nsetkind untyped\n") == 2);
}

TEST_CASE("trace: strict mode turns warnings into errors") {
    const char* text = "task a\ncompute avx2demand 100\n";
    CHECK(parse_trace(text).warnings.size() == 1);
    CHECK_THROWS_AS(parse_trace(text, true), ParseError);
}

TEST_CASE("trace: generated workloads round-trip") {
    const auto web = gen_web(small_web(SimdVariant::AVX2), 9);
    CHECK(same_tasks(parse_trace(serialize_trace(web)).tasks, web));
    const auto mb = gen_microbench(MicrobenchParams{}, 1);
    CHECK(same_tasks(parse_trace(serialize_trace(mb)).tasks, mb));
    std::vector<TaskSpec> odd = parse_trace("task x ratio=1.5 arrival=12.345\ncompute scalar 7 a b\n").tasks;
    CHECK(same_tasks(parse_trace(serialize_trace(odd)).tasks, odd));
}

TEST_CASE("trace: load_trace reports the path") {
    const auto dir = std::filesystem::temp_directory_path() / "avxsim_trace_test";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.trace";
    std::ofstream(good) << "task a\ncompute scalar 5\n";
    CHECK(load_trace(good).tasks.size() == 1);
    const auto bad = dir / "bad.trace";
    std::ofstream(bad) << "task a\nbogus\n";
    try {
        load_trace(bad);
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bad.trace: line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_trace(dir / "missing.trace"), Error);
    std::filesystem::remove_all(dir);
}

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
#include "avxsim/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "avxsim/error.hpp"

namespace avxsim {

namespace {

// std::uniform_real_distribution is implementation defined; this is not.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    // from_chars for double is missing from older libstdc++.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<SegmentKind> parse_segment_kind(std::string_view s) {
    if (s == "scalar") return SegmentKind::ScalarDense;
    if (s == "avx1") return SegmentKind::AvxL1;
    if (s == "avx2demand") return SegmentKind::AvxL2;
    return std::nullopt;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string_view to_string(SimdVariant v) {
    switch (v) {
    case SimdVariant::SSE4: return "sse4";
    case SimdVariant::AVX2: return "avx2";
    case SimdVariant::AVX512: return "avx512";
    }
    return "?";
}

std::optional<SimdVariant> parse_variant(std::string_view text) {
    if (text == "sse4") return SimdVariant::SSE4;
    if (text == "avx2") return SimdVariant::AVX2;
    if (text == "avx512") return SimdVariant::AVX512;
    return std::nullopt;
}

SegmentKind crypto_segment_kind(SimdVariant v) {
    switch (v) {
    case SimdVariant::SSE4: return SegmentKind::ScalarDense;
    case SimdVariant::AVX2: return SegmentKind::AvxL1;
    case SimdVariant::AVX512: return SegmentKind::AvxL2;
    }
    return SegmentKind::ScalarDense;
}

void WebWorkloadParams::validate() const {
    for (std::size_t i = 0; i < crypto_cycles.size(); ++i)
        if (crypto_cycles[i] <= 0)
            throw ConfigError("crypto_cycles." + std::string(to_string(static_cast<SimdVariant>(i))),
                              "must be positive");
    if (scalar_cycles <= 0) throw ConfigError("scalar_cycles", "must be positive");
    if (n_server_cores < 1) throw ConfigError("n_server_cores", "must be at least 1");
    if (avx_core_count < 0 || avx_core_count > n_server_cores)
        throw ConfigError("avx_core_count", "must lie in [0, n_server_cores]");
    if (n_connections < 1) throw ConfigError("n_connections", "must be at least 1");
    if (requests_per_program < 1) throw ConfigError("requests_per_program", "must be at least 1");
    if (!(jitter >= 0.0 && jitter < 1.0)) throw ConfigError("jitter", "must lie in [0, 1)");
}

void MicrobenchParams::validate() const {
    if (n_threads < 1) throw ConfigError("n_threads", "must be at least 1");
    if (n_cores < 1) throw ConfigError("n_cores", "must be at least 1");
    if (!(avx_fraction >= 0.0 && avx_fraction <= 1.0)) throw ConfigError("avx_fraction", "must lie in [0, 1]");
    if (loop_cycles < 1) throw ConfigError("loop_cycles", "must be at least 1");
}

std::vector<TaskSpec> gen_web(const WebWorkloadParams& params, std::uint64_t seed) {
    if (params.n_connections < 1) throw Error("web workload needs at least one connection");
    params.validate();
    std::mt19937_64 rng(seed);
    const SegmentKind crypto_kind = crypto_segment_kind(params.simd_variant);
    const std::int64_t crypto = params.crypto_cycles[static_cast<std::size_t>(params.simd_variant)];

    std::vector<TaskSpec> tasks;
    tasks.reserve(static_cast<std::size_t>(params.n_connections));
    for (int c = 0; c < params.n_connections; ++c) {
        auto prog = std::make_shared<Program>();
        prog->loop = true;
        for (int r = 0; r < params.requests_per_program; ++r) {
            // One draw per request scales both halves: a bigger response costs
            // more to encrypt and to compress.
            const double f = 1.0 + params.jitter * (2.0 * unit_uniform(rng) - 1.0);
            const auto scale = [f](std::int64_t n) {
                return std::max<std::int64_t>(1, std::llround(static_cast<double>(n) * f));
            };
            prog->entries.emplace_back(SetKind{TaskKind::Avx});
            prog->entries.emplace_back(Compute{crypto_kind, scale(crypto), "ssl"});
            prog->entries.emplace_back(SetKind{TaskKind::Scalar});
            prog->entries.emplace_back(Compute{SegmentKind::ScalarDense, scale(params.scalar_cycles), "http+brotli"});
            prog->entries.emplace_back(EndUnit{});
        }
        tasks.push_back(TaskSpec{"conn" + std::to_string(c), 1.0, std::move(prog), SimTime{}});
    }
    return tasks;
}

std::vector<TaskSpec> gen_microbench(const MicrobenchParams& params, std::uint64_t seed) {
    params.validate();
    (void)seed; // every thread runs the same loop
    const auto marked = static_cast<std::int64_t>(std::llround(params.avx_fraction * params.loop_cycles));
    const std::int64_t rest = params.loop_cycles - marked;

    auto prog = std::make_shared<Program>();
    prog->loop = true;
    if (marked > 0) {
        prog->entries.emplace_back(SetKind{TaskKind::Avx});
        prog->entries.emplace_back(Compute{SegmentKind::ScalarDense, marked, "fake-avx"});
        prog->entries.emplace_back(SetKind{TaskKind::Scalar});
    }
    if (rest > 0) prog->entries.emplace_back(Compute{SegmentKind::ScalarDense, rest, "loop"});
    prog->entries.emplace_back(EndUnit{});

    std::vector<TaskSpec> tasks;
    for (int t = 0; t < params.n_threads; ++t) tasks.push_back(TaskSpec{"thread" + std::to_string(t), 1.0, prog, {}});
    return tasks;
}

std::vector<TaskSpec> strip_kind_changes(const std::vector<TaskSpec>& tasks) {
    std::vector<TaskSpec> out;
    out.reserve(tasks.size());
    // Tasks frequently share one program; strip each distinct one once.
    std::vector<std::pair<const Program*, std::shared_ptr<const Program>>> done;
    for (const auto& t : tasks) {
        std::shared_ptr<const Program> stripped;
        for (const auto& [src, dst] : done)
            if (src == t.program.get()) stripped = dst;
        if (!stripped) {
            stripped = std::make_shared<Program>(strip_kind_changes(*t.program));
            done.emplace_back(t.program.get(), stripped);
        }
        out.push_back(TaskSpec{t.name, t.priority_ratio, stripped, t.arrival});
    }
    return out;
}

TraceWorkload parse_trace(std::string_view text, bool strict) {
    struct Frame {
        std::vector<ProgramEntry> entries;
        std::int64_t count;
        int line;
    };
    TraceWorkload out;
    std::vector<Frame> stack;
    std::optional<TaskSpec> current;
    std::shared_ptr<Program> prog;
    int current_line = 0;

    auto finish_task = [&]() {
        if (!current) return;
        if (!stack.empty()) throw ParseError(stack.back().line, "repeat block not closed by 'end'");
        if (prog->entries.empty()) throw ParseError(current_line, "task '" + current->name + "' has no entries");
        for (const auto& w : validate_program(*prog)) {
            const std::string msg = "task '" + current->name + "': " + w;
            if (strict) throw ParseError(current_line, msg);
            out.warnings.push_back("line " + std::to_string(current_line) + ": " + msg);
        }
        current->program = prog;
        out.tasks.push_back(std::move(*current));
        current.reset();
    };
    // Entries before the first task line belong to an implicit task "main".
    auto open_implicit = [&](int line) {
        if (current) return;
        current = TaskSpec{"main", 1.0, nullptr, SimTime{}};
        prog = std::make_shared<Program>();
        current_line = line;
    };
    auto add = [&](ProgramEntry e, int line) {
        open_implicit(line);
        if (stack.empty())
            prog->entries.push_back(std::move(e));
        else
            stack.back().entries.push_back(std::move(e));
    };

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        const std::string_view cmd = tok[0];

        if (cmd == "task") {
            finish_task();
            if (tok.size() < 2) throw ParseError(lineno, "task needs a name");
            TaskSpec spec;
            spec.name = std::string(tok[1]);
            for (std::size_t i = 2; i < tok.size(); ++i) {
                const std::string_view opt = tok[i];
                if (opt == "loop") {
                    continue;
                } else if (opt.starts_with("ratio=")) {
                    const auto r = parse_double(opt.substr(6));
                    if (!r || *r < 1.0) throw ParseError(lineno, "ratio must be a number >= 1");
                    spec.priority_ratio = *r;
                } else if (opt.starts_with("arrival=")) {
                    const auto a = parse_double(opt.substr(8));
                    if (!a || *a < 0.0) throw ParseError(lineno, "arrival must be a non-negative number of ns");
                    spec.arrival = SimTime::from_ns(*a);
                } else {
                    throw ParseError(lineno, "unknown task option '" + std::string(opt) + "'");
                }
            }
            for (const auto& other : out.tasks)
                if (other.name == spec.name) throw ParseError(lineno, "duplicate task name '" + spec.name + "'");
            prog = std::make_shared<Program>();
            prog->loop = std::find(tok.begin() + 2, tok.end(), std::string_view("loop")) != tok.end();
            current = std::move(spec);
            current_line = lineno;
        } else if (cmd == "compute") {
            if (tok.size() < 3) throw ParseError(lineno, "usage: compute <scalar|avx1|avx2demand> <cycles> [label]");
            const auto kind = parse_segment_kind(tok[1]);
            if (!kind) throw ParseError(lineno, "unknown segment kind '" + std::string(tok[1]) + "'");
            const auto cycles = parse_number<std::int64_t>(tok[2]);
            if (!cycles || *cycles < 0) throw ParseError(lineno, "cycle count must be a non-negative integer");
            std::string label;
            for (std::size_t i = 3; i < tok.size(); ++i) {
                if (!label.empty()) label += ' ';
                label += tok[i];
            }
            add(Compute{*kind, *cycles, std::move(label)}, lineno);
        } else if (cmd == "setkind") {
            if (tok.size() != 2) throw ParseError(lineno, "usage: setkind <scalar|avx>");
            if (tok[1] == "scalar")
                add(SetKind{TaskKind::Scalar}, lineno);
            else if (tok[1] == "avx")
                add(SetKind{TaskKind::Avx}, lineno);
            else
                throw ParseError(lineno, "setkind takes 'scalar' or 'avx'");
        } else if (cmd == "endunit") {
            if (tok.size() != 1) throw ParseError(lineno, "endunit takes no arguments");
            add(EndUnit{}, lineno);
        } else if (cmd == "repeat") {
            open_implicit(lineno);
            if (tok.size() != 2) throw ParseError(lineno, "usage: repeat <n>");
            const auto n = parse_number<std::int64_t>(tok[1]);
            if (!n || *n < 0) throw ParseError(lineno, "repeat count must be a non-negative integer");
            stack.push_back(Frame{{}, *n, lineno});
        } else if (cmd == "end") {
            if (stack.empty()) throw ParseError(lineno, "'end' without 'repeat'");
            Frame f = std::move(stack.back());
            stack.pop_back();
            auto& dst = stack.empty() ? prog->entries : stack.back().entries;
            if (static_cast<double>(f.count) * static_cast<double>(f.entries.size()) > 5e7)
                throw ParseError(f.line, "repeat block expands to too many entries");
            for (std::int64_t i = 0; i < f.count; ++i) dst.insert(dst.end(), f.entries.begin(), f.entries.end());
        } else {
            throw ParseError(lineno, "unknown directive '" + std::string(cmd) + "'");
        }
    }
    finish_task();
    if (out.tasks.empty()) throw ParseError(lineno, "no tasks defined");
    return out;
}

TraceWorkload load_trace(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open trace file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_trace(ss.str(), strict);
    } catch (const ParseError& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string serialize_trace(const std::vector<TaskSpec>& tasks) {
    std::ostringstream os;
    for (const auto& t : tasks) {
        os << "task " << t.name;
        if (t.priority_ratio != 1.0) os << " ratio=" << format_double(t.priority_ratio);
        if (t.arrival != SimTime{}) os << " arrival=" << t.arrival.to_ns_string();
        if (t.program->loop) os << " loop";
        os << '\n';
        for (const auto& e : t.program->entries) {
            if (const auto* c = std::get_if<Compute>(&e)) {
                os << "compute " << to_string(c->kind) << ' ' << c->cycles;
                if (!c->label.empty()) os << ' ' << c->label;
                os << '\n';
            } else if (const auto* sk = std::get_if<SetKind>(&e)) {
                os << "setkind " << (sk->kind == TaskKind::Avx ? "avx" : "scalar") << '\n';
            } else {
                os << "endunit\n";
            }
        }
    }
    return os.str();
}

} // namespace avxsim

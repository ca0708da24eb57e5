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
#include "avxsim/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "avxsim/analyzer.hpp"
#include "avxsim/batch.hpp"
#include "avxsim/error.hpp"

namespace avxsim {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    return f;
}

SimConfigFile load_with_overrides(const fs::path& path, const CommandOptions& opts) {
    SimConfigFile cfg = load_config(path);
    if (opts.seed) cfg.sim.run.seed = *opts.seed;
    if (opts.trace) cfg.output.trace = opts.trace;
    if (opts.folded) cfg.output.folded = opts.folded;
    if (opts.report) cfg.output.report = opts.report;
    return cfg;
}

// Shared error-to-exit-code mapping for the config-driven commands.
template <typename Fn>
int guarded(std::ostream& err, Fn fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

std::string pct(double frac) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f%%", frac * 100.0);
    return buf;
}

} // namespace

const CompareCell& CompareResult::cell(SimdVariant v, Policy p) const {
    for (const auto& c : cells)
        if (c.variant == v && c.policy == p) return c;
    throw Error("compare matrix has no such cell");
}

std::string CompareResult::to_text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-20s %12s %9s %9s\n", "variant", "policy", "units/s", "delta", "GHz");
    os << buf;
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%-8s %-20s %12.2f %9s %9.4f\n", std::string(to_string(c.variant)).c_str(),
                      std::string(to_string(c.policy)).c_str(), c.units_per_sec, pct(c.delta).c_str(),
                      c.mean_freq_ghz);
        os << buf;
    }
    os << "\nvariability reduction\n";
    for (SimdVariant v : kAllVariants) {
        const auto& vr = variability_reduction[static_cast<std::size_t>(v)];
        if (!vr) continue;
        std::snprintf(buf, sizeof buf, "  %-8s %6.1f%%\n", std::string(to_string(v)).c_str(), *vr * 100.0);
        os << buf;
    }
    return os.str();
}

nlohmann::ordered_json CompareResult::to_json() const {
    nlohmann::ordered_json j;
    auto& arr = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
        nlohmann::ordered_json e;
        e["variant"] = std::string(to_string(c.variant));
        e["policy"] = std::string(to_string(c.policy));
        e["units_per_sec"] = c.units_per_sec;
        e["delta"] = c.delta;
        e["mean_freq_ghz"] = c.mean_freq_ghz;
        arr.push_back(std::move(e));
    }
    auto& vr = j["variability_reduction"] = nlohmann::ordered_json::object();
    for (SimdVariant v : kAllVariants)
        if (const auto& r = variability_reduction[static_cast<std::size_t>(v)]) vr[std::string(to_string(v))] = *r;
    return j;
}

std::string SweepResult::to_text() const {
    std::ostringstream os;
    os << "# kind_changes_per_sec overhead_percent\n";
    char buf[96];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.3f %.6f\n", p.kind_changes_per_sec, p.overhead * 100.0);
        os << buf;
    }
    return os.str();
}

nlohmann::ordered_json SweepResult::to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        nlohmann::ordered_json e;
        e["loop_cycles"] = p.loop_cycles;
        e["kind_changes_per_sec"] = p.kind_changes_per_sec;
        e["overhead_percent"] = p.overhead * 100.0;
        e["units_per_sec"] = p.units_per_sec;
        e["reference_units_per_sec"] = p.reference_units_per_sec;
        arr.push_back(std::move(e));
    }
    return arr;
}

CompareResult run_compare(const SimConfigFile& cfg, int jobs) {
    if (cfg.workload.type != WorkloadType::Web) throw ConfigError("workload.type", "compare needs a web workload");
    SimConfigFile cs_check = with_variant(cfg, SimdVariant::SSE4, Policy::CoreSpecialization);
    cs_check.validate();
    check_penalty_soundness(cs_check.sim, 1.0);

    std::vector<SimJob> batch;
    std::vector<CompareCell> cells;
    for (SimdVariant v : kAllVariants) {
        for (Policy p : {Policy::Baseline, Policy::CoreSpecialization}) {
            const SimConfigFile c = with_variant(cfg, v, p);
            batch.push_back(SimJob{c.sim, build_workload(c)});
            cells.push_back(CompareCell{v, p});
        }
    }
    const auto reports = run_batch_parallel(batch, jobs);

    CompareResult res;
    const double ref = reports[0].units_per_sec;
    if (ref <= 0.0) throw Error("reference cell completed no work; increase run.horizon");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].units_per_sec = reports[i].units_per_sec;
        cells[i].mean_freq_ghz = reports[i].mean_freq_ghz;
        cells[i].delta = reports[i].units_per_sec / ref - 1.0;
    }
    res.cells = std::move(cells);
    for (SimdVariant v : kAllVariants) {
        const double base = res.cell(v, Policy::Baseline).delta;
        const double cs = res.cell(v, Policy::CoreSpecialization).delta;
        if (v != SimdVariant::SSE4 && base != 0.0)
            res.variability_reduction[static_cast<std::size_t>(v)] = 1.0 - cs / base;
    }
    return res;
}

SweepResult run_sweep(const SimConfigFile& cfg, int jobs) {
    if (cfg.workload.type != WorkloadType::Microbench)
        throw ConfigError("workload.type", "sweep needs a microbench workload");
    std::vector<std::int64_t> lengths = cfg.workload.loop_cycles_sweep;
    if (lengths.empty()) lengths.push_back(cfg.workload.microbench.loop_cycles);

    std::vector<SimJob> batch;
    for (std::int64_t len : lengths) {
        MicrobenchParams mp = cfg.workload.microbench;
        mp.loop_cycles = len;
        auto tasks = gen_microbench(mp, cfg.sim.run.seed);
        batch.push_back(SimJob{cfg.sim, tasks});
        batch.push_back(SimJob{cfg.sim, strip_kind_changes(tasks)});
    }
    const auto reports = run_batch_parallel(batch, jobs);

    SweepResult res;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const SimReport& annotated = reports[2 * i];
        const SimReport& reference = reports[2 * i + 1];
        if (annotated.units_per_sec <= 0.0)
            throw Error("loop of " + std::to_string(lengths[i]) + " cycles completed no iteration");
        SweepPoint p;
        p.loop_cycles = lengths[i];
        p.kind_changes_per_sec = annotated.kind_changes_per_core_sec;
        p.units_per_sec = annotated.units_per_sec;
        p.reference_units_per_sec = reference.units_per_sec;
        p.overhead = reference.units_per_sec / annotated.units_per_sec - 1.0;
        res.points.push_back(p);
    }
    std::stable_sort(res.points.begin(), res.points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) { return a.kind_changes_per_sec < b.kind_changes_per_sec; });
    return res;
}

int cmd_simulate(const fs::path& config_path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SimConfigFile cfg = load_with_overrides(config_path, opts);
        const auto tasks = build_workload(cfg);

        Simulation sim(cfg.sim, tasks);
        std::ofstream trace;
        if (cfg.output.trace) {
            trace = open_out(*cfg.output.trace);
            sim.set_trace(&trace);
        }
        const SimReport rep = sim.run();

        const std::string json_text = rep.to_json().dump(2) + "\n";
        if (opts.json)
            out << json_text;
        else
            out << rep.to_text();
        if (cfg.output.report) open_out(*cfg.output.report) << json_text;
        if (cfg.output.folded) open_out(*cfg.output.folded) << emit_folded(rep.attribution);
        return kExitOk;
    });
}

int cmd_compare(const fs::path& config_path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SimConfigFile cfg = load_with_overrides(config_path, opts);
        const CompareResult res = run_compare(cfg, opts.jobs);
        const std::string json_text = res.to_json().dump(2) + "\n";
        out << (opts.json ? json_text : res.to_text());
        if (cfg.output.report) open_out(*cfg.output.report) << json_text;
        return kExitOk;
    });
}

int cmd_sweep(const fs::path& config_path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SimConfigFile cfg = load_with_overrides(config_path, opts);
        const SweepResult res = run_sweep(cfg, opts.jobs);
        const std::string json_text = res.to_json().dump(2) + "\n";
        out << (opts.json ? json_text : res.to_text());
        if (cfg.output.report) open_out(*cfg.output.report) << json_text;
        return kExitOk;
    });
}

int cmd_analyze(const std::vector<fs::path>& listings, double min_ratio, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
    if (listings.empty()) {
        err << "error: no listing files given\n";
        return kExitUsage;
    }
    struct FileResult {
        std::vector<DisasmFunction> functions;
        std::int64_t skipped = 0;
        std::string error;
    };
    std::vector<FileResult> results(listings.size());
    parallel_for(listings.size(), opts.jobs, [&](std::size_t i) {
        try {
            std::ifstream in(listings[i], std::ios::binary);
            if (!in) throw Error("cannot open file");
            std::ostringstream ss;
            ss << in.rdbuf();
            auto listing = parse_disassembly(ss.str());
            for (auto& f : listing.functions) f.source = listings[i].filename().string();
            results[i].functions = std::move(listing.functions);
            results[i].skipped = listing.skipped_lines;
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    std::vector<DisasmFunction> all;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < listings.size(); ++i) {
        if (!results[i].error.empty()) {
            err << "error: " << listings[i].string() << ": " << results[i].error << '\n';
            ++failures;
            continue;
        }
        if (results[i].skipped > 0)
            err << listings[i].string() << ": skipped " << results[i].skipped << " non-instruction line(s)\n";
        for (auto& f : results[i].functions) all.push_back(std::move(f));
    }
    if (failures == listings.size()) return kExitRuntime;

    const RatioReport rep = ratio_report(all).filtered(min_ratio);
    if (opts.json)
        out << rep.to_json().dump(2) << '\n';
    else
        out << rep.to_text();
    if (opts.report) {
        try {
            open_out(*opts.report) << rep.to_json().dump(2) << '\n';
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
    }
    return kExitOk;
}

} // namespace avxsim

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
#include "avxsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "avxsim/error.hpp"

namespace avxsim {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError(join(path, it.key()), "unknown key");
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
}

std::int64_t get_int(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    const double d = get_number(v, path);
    if (d != std::floor(d) || std::fabs(d) > 9e18) throw ConfigError(path, "expected an integer");
    return static_cast<std::int64_t>(d);
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

// Durations are written as nanoseconds.
SimTime get_duration(const json& v, const std::string& path) {
    const double ns = get_number(v, path);
    if (std::fabs(ns) > 9e15) throw ConfigError(path, "duration out of range");
    return SimTime::from_ns(ns);
}

double ns_value(SimTime t) { return static_cast<double>(t.ps()) / 1e3; }

// Apply `fn` to obj[key] if present.
template <typename Fn>
void with(const json& obj, const std::string& path, const char* key, Fn fn) {
    if (const auto it = obj.find(key); it != obj.end()) fn(*it, join(path, key));
}

void read_cpu(const json& j, const std::string& p, CpuParams& cpu) {
    check_keys(j, p,
               {"freq_ghz", "license_grant_delay", "revert_delay", "detection_delay_cycles", "throttle_speed_factor"});
    with(j, p, "freq_ghz", [&](const json& f, const std::string& fp) {
        check_keys(f, fp, {"L0", "L1", "L2"});
        for (FrequencyLevel l : kAllLevels) {
            const std::string name(to_string(l));
            with(f, fp, name.c_str(), [&](const json& v, const std::string& vp) {
                cpu.freq_ghz[static_cast<std::size_t>(l)] = get_number(v, vp);
            });
        }
    });
    with(j, p, "license_grant_delay", [&](const json& v, const std::string& vp) { cpu.license_grant_delay = get_duration(v, vp); });
    with(j, p, "revert_delay", [&](const json& v, const std::string& vp) { cpu.revert_delay = get_duration(v, vp); });
    with(j, p, "detection_delay_cycles",
         [&](const json& v, const std::string& vp) { cpu.detection_delay_cycles = get_int(v, vp); });
    with(j, p, "throttle_speed_factor",
         [&](const json& v, const std::string& vp) { cpu.throttle_speed_factor = get_number(v, vp); });
}

void read_sched(const json& j, const std::string& p, SchedParams& s) {
    check_keys(j, p,
               {"policy", "n_cores", "avx_core_ids", "rr_interval", "scalar_penalty", "kind_change_cost",
                "migration_cost", "preempt_cost"});
    with(j, p, "policy", [&](const json& v, const std::string& vp) {
        const auto pol = parse_policy(get_string(v, vp));
        if (!pol) throw ConfigError(vp, "expected \"baseline\" or \"core_specialization\"");
        s.policy = *pol;
    });
    with(j, p, "n_cores", [&](const json& v, const std::string& vp) {
        const auto n = get_int(v, vp);
        if (n < 1 || n > 4096) throw ConfigError(vp, "must lie in [1, 4096]");
        s.n_cores = static_cast<int>(n);
    });
    with(j, p, "avx_core_ids", [&](const json& v, const std::string& vp) {
        if (!v.is_array()) throw ConfigError(vp, "expected an array of core ids");
        s.avx_core_ids.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string ip = vp + "[" + std::to_string(i) + "]";
            const auto c = get_int(v[i], ip);
            if (c < 0 || c > 1'000'000) throw ConfigError(ip, "core " + std::to_string(c) + " out of range");
            s.avx_core_ids.push_back(static_cast<int>(c));
        }
    });
    with(j, p, "rr_interval", [&](const json& v, const std::string& vp) { s.rr_interval = get_duration(v, vp); });
    with(j, p, "scalar_penalty", [&](const json& v, const std::string& vp) { s.scalar_penalty = get_duration(v, vp); });
    with(j, p, "kind_change_cost", [&](const json& v, const std::string& vp) { s.kind_change_cost = get_duration(v, vp); });
    with(j, p, "migration_cost", [&](const json& v, const std::string& vp) { s.migration_cost = get_duration(v, vp); });
    with(j, p, "preempt_cost", [&](const json& v, const std::string& vp) { s.preempt_cost = get_duration(v, vp); });
}

void read_run(const json& j, const std::string& p, RunParams& r) {
    check_keys(j, p, {"horizon", "warmup", "seed"});
    with(j, p, "horizon", [&](const json& v, const std::string& vp) { r.horizon = get_duration(v, vp); });
    with(j, p, "warmup", [&](const json& v, const std::string& vp) { r.warmup = get_duration(v, vp); });
    with(j, p, "seed", [&](const json& v, const std::string& vp) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError(vp, "expected a non-negative integer");
        r.seed = v.get<std::uint64_t>();
    });
}

void read_web(const json& j, const std::string& p, WebWorkloadParams& w) {
    check_keys(j, p,
               {"type", "simd_variant", "crypto_cycles", "scalar_cycles", "n_server_cores", "avx_core_count",
                "n_connections", "requests_per_program", "jitter"});
    with(j, p, "simd_variant", [&](const json& v, const std::string& vp) {
        const auto var = parse_variant(get_string(v, vp));
        if (!var) throw ConfigError(vp, "expected \"sse4\", \"avx2\" or \"avx512\"");
        w.simd_variant = *var;
    });
    with(j, p, "crypto_cycles", [&](const json& c, const std::string& cp) {
        check_keys(c, cp, {"sse4", "avx2", "avx512"});
        for (SimdVariant var : kAllVariants) {
            const std::string name(to_string(var));
            with(c, cp, name.c_str(), [&](const json& v, const std::string& vp) {
                w.crypto_cycles[static_cast<std::size_t>(var)] = get_int(v, vp);
            });
        }
    });
    with(j, p, "scalar_cycles", [&](const json& v, const std::string& vp) { w.scalar_cycles = get_int(v, vp); });
    with(j, p, "n_server_cores",
         [&](const json& v, const std::string& vp) { w.n_server_cores = static_cast<int>(get_int(v, vp)); });
    with(j, p, "avx_core_count",
         [&](const json& v, const std::string& vp) { w.avx_core_count = static_cast<int>(get_int(v, vp)); });
    with(j, p, "n_connections", [&](const json& v, const std::string& vp) {
        const auto n = get_int(v, vp);
        if (n < 1 || n > 10'000'000) throw ConfigError(vp, "must lie in [1, 10^7]");
        w.n_connections = static_cast<int>(n);
    });
    with(j, p, "requests_per_program",
         [&](const json& v, const std::string& vp) { w.requests_per_program = static_cast<int>(get_int(v, vp)); });
    with(j, p, "jitter", [&](const json& v, const std::string& vp) { w.jitter = get_number(v, vp); });
    try {
        w.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(join(p, e.field()), std::string(e.what()).substr(e.field().size() + 2));
    }
}

void read_microbench(const json& j, const std::string& p, WorkloadConfig& wc) {
    MicrobenchParams& m = wc.microbench;
    check_keys(j, p, {"type", "n_threads", "n_cores", "avx_fraction", "loop_cycles", "loop_cycles_sweep"});
    with(j, p, "n_threads", [&](const json& v, const std::string& vp) { m.n_threads = static_cast<int>(get_int(v, vp)); });
    with(j, p, "n_cores", [&](const json& v, const std::string& vp) { m.n_cores = static_cast<int>(get_int(v, vp)); });
    with(j, p, "avx_fraction", [&](const json& v, const std::string& vp) { m.avx_fraction = get_number(v, vp); });
    with(j, p, "loop_cycles", [&](const json& v, const std::string& vp) { m.loop_cycles = get_int(v, vp); });
    with(j, p, "loop_cycles_sweep", [&](const json& v, const std::string& vp) {
        if (!v.is_array()) throw ConfigError(vp, "expected an array of cycle counts");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string ip = vp + "[" + std::to_string(i) + "]";
            const auto n = get_int(v[i], ip);
            if (n < 1) throw ConfigError(ip, "must be at least 1");
            wc.loop_cycles_sweep.push_back(n);
        }
    });
    try {
        m.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(join(p, e.field()), std::string(e.what()).substr(e.field().size() + 2));
    }
}

void read_workload(const json& j, const std::string& p, const fs::path& base, WorkloadConfig& wc) {
    if (!j.is_object()) throw ConfigError(p, "expected an object");
    const auto t = j.find("type");
    if (t == j.end()) throw ConfigError(join(p, "type"), "missing (web, microbench or trace)");
    const std::string type = get_string(*t, join(p, "type"));
    if (type == "web") {
        wc.type = WorkloadType::Web;
        read_web(j, p, wc.web);
    } else if (type == "microbench") {
        wc.type = WorkloadType::Microbench;
        read_microbench(j, p, wc);
    } else if (type == "trace") {
        wc.type = WorkloadType::Trace;
        check_keys(j, p, {"type", "path", "strict"});
        const auto it = j.find("path");
        if (it == j.end()) throw ConfigError(join(p, "path"), "missing");
        fs::path tp = get_string(*it, join(p, "path"));
        if (tp.is_relative()) tp = base / tp;
        if (!fs::exists(tp)) throw ConfigError(join(p, "path"), "file '" + tp.string() + "' does not exist");
        wc.trace_path = tp;
        with(j, p, "strict", [&](const json& v, const std::string& vp) { wc.strict = get_bool(v, vp); });
    } else {
        throw ConfigError(join(p, "type"), "unknown workload type '" + type + "'");
    }
}

void read_output(const json& j, const std::string& p, const fs::path& base, OutputConfig& o) {
    check_keys(j, p, {"report", "trace", "folded"});
    auto path_of = [&](const json& v, const std::string& vp) {
        fs::path out = get_string(v, vp);
        return out.is_relative() ? base / out : out;
    };
    with(j, p, "report", [&](const json& v, const std::string& vp) { o.report = path_of(v, vp); });
    with(j, p, "trace", [&](const json& v, const std::string& vp) { o.trace = path_of(v, vp); });
    with(j, p, "folded", [&](const json& v, const std::string& vp) { o.folded = path_of(v, vp); });
}

ConfigError prefixed(const std::string& prefix, const ConfigError& e) {
    return ConfigError(prefix + "." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
}

} // namespace

void SimConfigFile::validate() const {
    sim.validate();
    if (workload.type == WorkloadType::Web) {
        if (workload.web.n_server_cores != sim.sched.n_cores)
            throw ConfigError("workload.n_server_cores", "must equal sched.n_cores (" +
                                                             std::to_string(sim.sched.n_cores) + ")");
        if (sim.sched.policy == Policy::CoreSpecialization &&
            static_cast<std::size_t>(workload.web.avx_core_count) != sim.sched.avx_core_ids.size())
            throw ConfigError("workload.avx_core_count", "must equal the number of sched.avx_core_ids");
    } else if (workload.type == WorkloadType::Microbench) {
        if (workload.microbench.n_cores != sim.sched.n_cores)
            throw ConfigError("workload.n_cores",
                              "must equal sched.n_cores (" + std::to_string(sim.sched.n_cores) + ")");
    }
}

SimConfigFile parse_config(std::string_view text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    check_keys(j, "", {"cpu", "sched", "workload", "run", "output"});

    SimConfigFile cfg;
    with(j, "", "cpu", [&](const json& v, const std::string& p) { read_cpu(v, p, cfg.sim.cpu); });
    with(j, "", "sched", [&](const json& v, const std::string& p) { read_sched(v, p, cfg.sim.sched); });
    with(j, "", "run", [&](const json& v, const std::string& p) { read_run(v, p, cfg.sim.run); });
    const auto w = j.find("workload");
    if (w == j.end()) throw ConfigError("workload", "missing");
    read_workload(*w, "workload", base_dir, cfg.workload);
    with(j, "", "output", [&](const json& v, const std::string& p) { read_output(v, p, base_dir, cfg.output); });

    try {
        cfg.sim.cpu.validate();
    } catch (const ConfigError& e) {
        throw prefixed("cpu", e);
    }
    try {
        cfg.sim.sched.validate();
    } catch (const ConfigError& e) {
        throw prefixed("sched", e);
    }
    cfg.validate();

    double max_ratio = 1.0;
    if (cfg.workload.type == WorkloadType::Trace) {
        const auto tw = load_trace(cfg.workload.trace_path, cfg.workload.strict);
        for (const auto& t : tw.tasks) max_ratio = std::max(max_ratio, t.priority_ratio);
    }
    check_penalty_soundness(cfg.sim, max_ratio);
    return cfg;
}

SimConfigFile load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::absolute(path).parent_path());
}

nlohmann::ordered_json SimConfigFile::to_json() const {
    nlohmann::ordered_json j;
    const CpuParams& c = sim.cpu;
    j["cpu"]["freq_ghz"] = {{"L0", c.freq_ghz[0]}, {"L1", c.freq_ghz[1]}, {"L2", c.freq_ghz[2]}};
    j["cpu"]["license_grant_delay"] = ns_value(c.license_grant_delay);
    j["cpu"]["revert_delay"] = ns_value(c.revert_delay);
    j["cpu"]["detection_delay_cycles"] = c.detection_delay_cycles;
    j["cpu"]["throttle_speed_factor"] = c.throttle_speed_factor;

    const SchedParams& s = sim.sched;
    j["sched"]["policy"] = std::string(to_string(s.policy));
    j["sched"]["n_cores"] = s.n_cores;
    j["sched"]["avx_core_ids"] = s.avx_core_ids;
    j["sched"]["rr_interval"] = ns_value(s.rr_interval);
    j["sched"]["scalar_penalty"] = ns_value(s.scalar_penalty);
    j["sched"]["kind_change_cost"] = ns_value(s.kind_change_cost);
    j["sched"]["migration_cost"] = ns_value(s.migration_cost);
    j["sched"]["preempt_cost"] = ns_value(s.preempt_cost);

    auto& w = j["workload"];
    switch (workload.type) {
    case WorkloadType::Web: {
        const auto& p = workload.web;
        w["type"] = "web";
        w["simd_variant"] = std::string(to_string(p.simd_variant));
        for (SimdVariant v : kAllVariants)
            w["crypto_cycles"][std::string(to_string(v))] = p.crypto_cycles[static_cast<std::size_t>(v)];
        w["scalar_cycles"] = p.scalar_cycles;
        w["n_server_cores"] = p.n_server_cores;
        w["avx_core_count"] = p.avx_core_count;
        w["n_connections"] = p.n_connections;
        w["requests_per_program"] = p.requests_per_program;
        w["jitter"] = p.jitter;
        break;
    }
    case WorkloadType::Microbench: {
        const auto& p = workload.microbench;
        w["type"] = "microbench";
        w["n_threads"] = p.n_threads;
        w["n_cores"] = p.n_cores;
        w["avx_fraction"] = p.avx_fraction;
        w["loop_cycles"] = p.loop_cycles;
        if (!workload.loop_cycles_sweep.empty()) w["loop_cycles_sweep"] = workload.loop_cycles_sweep;
        break;
    }
    case WorkloadType::Trace:
        w["type"] = "trace";
        w["path"] = workload.trace_path.string();
        w["strict"] = workload.strict;
        break;
    }

    j["run"]["horizon"] = ns_value(sim.run.horizon);
    j["run"]["warmup"] = ns_value(sim.run.warmup);
    j["run"]["seed"] = sim.run.seed;
    if (output.report || output.trace || output.folded) {
        auto& o = j["output"];
        if (output.report) o["report"] = output.report->string();
        if (output.trace) o["trace"] = output.trace->string();
        if (output.folded) o["folded"] = output.folded->string();
    }
    return j;
}

std::vector<TaskSpec> build_workload(const SimConfigFile& cfg) {
    switch (cfg.workload.type) {
    case WorkloadType::Web: return gen_web(cfg.workload.web, cfg.sim.run.seed);
    case WorkloadType::Microbench: return gen_microbench(cfg.workload.microbench, cfg.sim.run.seed);
    case WorkloadType::Trace: return load_trace(cfg.workload.trace_path, cfg.workload.strict).tasks;
    }
    throw Error("unknown workload type");
}

SimConfigFile with_variant(const SimConfigFile& cfg, SimdVariant variant, Policy policy) {
    SimConfigFile out = cfg;
    out.workload.web.simd_variant = variant;
    out.sim.sched.policy = policy;
    return out;
}

} // namespace avxsim

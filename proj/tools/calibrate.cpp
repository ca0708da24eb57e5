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

// Fits the web workload's cycle budgets (optionally also the throttle speed
// factor) to the measured nginx throughput and frequency matrix. See
// docs/calibration.md.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <gsl/gsl_multimin.h>

#include "avxsim/commands.hpp"
#include "avxsim/config.hpp"

namespace {

using namespace avxsim;

// Measured targets: throughput deltas vs. SSE4 and cycle-weighted mean
// frequency, for AVX2 and AVX-512, unmodified and specialized.
struct Target {
    SimdVariant variant;
    Policy policy;
    double delta;
    double ghz;
};
constexpr Target kTargets[] = {
    {SimdVariant::AVX2, Policy::Baseline, -0.042, 2.676},
    {SimdVariant::AVX512, Policy::Baseline, -0.112, 2.481},
    {SimdVariant::AVX2, Policy::CoreSpecialization, -0.011, 2.749},
    {SimdVariant::AVX512, Policy::CoreSpecialization, -0.032, 2.687},
};
// Half-widths of the accepted bands, used to normalize the residuals.
constexpr double kDeltaScaleBaseline = 0.015;
constexpr double kDeltaScaleSpecialized = 0.010;
constexpr double kGhzScale = 0.05;

// "openssl speed" throughput relative to SSE4, measured at the variant's own
// license frequency.
constexpr double kCryptoSpeedupAvx2 = 2.769;
constexpr double kCryptoSpeedupAvx512 = 3.669;

struct Fit {
    SimConfigFile base;
    int jobs = 0;
    bool fit_throttle = false;
    int evaluations = 0;
};

void apply(SimConfigFile& cfg, double c0, double scalar, double k) {
    const auto& f = cfg.sim.cpu.freq_ghz;
    auto& w = cfg.workload.web;
    w.crypto_cycles[0] = std::llround(c0);
    w.crypto_cycles[1] = std::llround(c0 * (f[1] / f[0]) / kCryptoSpeedupAvx2);
    w.crypto_cycles[2] = std::llround(c0 * (f[2] / f[0]) / kCryptoSpeedupAvx512);
    w.scalar_cycles = std::llround(scalar);
    cfg.sim.cpu.throttle_speed_factor = k;
}

double objective(const gsl_vector* x, void* p) {
    auto* fit = static_cast<Fit*>(p);
    const double c0 = std::exp(gsl_vector_get(x, 0));
    const double scalar = std::exp(gsl_vector_get(x, 1));
    const double k = fit->fit_throttle ? gsl_vector_get(x, 2) : fit->base.sim.cpu.throttle_speed_factor;
    if (!(k > 0.5 && k <= 1.0) || c0 < 1e3 || scalar < 1e5 || c0 > scalar) return 1e9;

    SimConfigFile cfg = fit->base;
    apply(cfg, c0, scalar, k);
    const CompareResult res = run_compare(cfg, fit->jobs);
    ++fit->evaluations;

    double sum = 0.0;
    for (const auto& t : kTargets) {
        const auto& c = res.cell(t.variant, t.policy);
        const double ds = t.policy == Policy::Baseline ? kDeltaScaleBaseline : kDeltaScaleSpecialized;
        sum += std::pow((c.delta - t.delta) / ds, 2) + std::pow((c.mean_freq_ghz - t.ghz) / kGhzScale, 2);
    }
    return sum;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit web workload cycle budgets to the measured throughput matrix"};
    std::string config;
    double c0 = 300'000, scalar = 12'000'000;
    int iterations = 200;
    Fit fit;
    app.add_option("config", config, "Web workload config used as the starting point")->required();
    app.add_option("--crypto", c0, "Initial SSE4 crypto cycles per request");
    app.add_option("--scalar", scalar, "Initial scalar cycles per request");
    app.add_flag("--fit-throttle", fit.fit_throttle, "Also fit cpu.throttle_speed_factor");
    app.add_option("--iterations", iterations, "Simplex iterations");
    app.add_option("--jobs", fit.jobs, "Worker threads");
    CLI11_PARSE(app, argc, argv);

    try {
        fit.base = load_config(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    const std::size_t dims = fit.fit_throttle ? 3 : 2;
    const double k = fit.base.sim.cpu.throttle_speed_factor;
    gsl_multimin_function fn{&objective, dims, &fit};
    gsl_vector* x = gsl_vector_alloc(dims);
    gsl_vector* step = gsl_vector_alloc(dims);
    gsl_vector_set(x, 0, std::log(c0));
    gsl_vector_set(x, 1, std::log(scalar));
    gsl_vector_set(step, 0, 0.15);
    gsl_vector_set(step, 1, 0.10);
    if (fit.fit_throttle) {
        gsl_vector_set(x, 2, k);
        gsl_vector_set(step, 2, 0.02);
    }

    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != 0) break;
        const double size = gsl_multimin_fminimizer_size(s);
        std::fprintf(stderr, "iter %3d  f=%.5f  crypto=%.0f scalar=%.0f k=%.4f  size=%.4f\n", it, s->fval,
                     std::exp(gsl_vector_get(s->x, 0)), std::exp(gsl_vector_get(s->x, 1)),
                     fit.fit_throttle ? gsl_vector_get(s->x, 2) : k, size);
        if (gsl_multimin_test_size(size, 1e-3) == GSL_SUCCESS) break;
    }

    SimConfigFile best = fit.base;
    apply(best, std::exp(gsl_vector_get(s->x, 0)), std::exp(gsl_vector_get(s->x, 1)),
          fit.fit_throttle ? gsl_vector_get(s->x, 2) : k);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(step);

    const CompareResult res = run_compare(best, fit.jobs);
    std::cout << res.to_text() << '\n';
    nlohmann::ordered_json out;
    out["throttle_speed_factor"] = best.sim.cpu.throttle_speed_factor;
    for (SimdVariant v : kAllVariants)
        out["crypto_cycles"][std::string(to_string(v))] = best.workload.web.crypto_cycles[static_cast<std::size_t>(v)];
    out["scalar_cycles"] = best.workload.web.scalar_cycles;
    out["evaluations"] = fit.evaluations;
    std::cout << out.dump(2) << '\n';
    return 0;
}

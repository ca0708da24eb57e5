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
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avxsim/commands.hpp"

int main(int argc, char** argv) {
    using namespace avxsim;

    CLI::App app{"avxsim: AVX frequency-license and core-specialization simulator"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string config;
    std::uint64_t seed = 0;
    std::string trace, folded, report;

    auto add_common = [&](CLI::App* sub, bool with_config) {
        if (with_config) sub->add_option("config", config, "Simulation config (JSON)")->required();
        sub->add_option("--seed", seed, "Override run.seed");
        sub->add_option("--jobs", opts.jobs, "Worker threads for independent runs (default: all)");
        sub->add_option("--report", report, "Write the machine-readable result here");
        sub->add_flag("--json", opts.json, "Print JSON instead of a table");
    };

    auto* simulate = app.add_subcommand("simulate", "Run one simulation and print its report");
    add_common(simulate, true);
    simulate->add_option("--trace", trace, "Write the event trace here");
    simulate->add_option("--folded", folded, "Write throttle attribution as folded stacks here");

    auto* compare = app.add_subcommand("compare", "Run the 3 variants x 2 policies web matrix");
    add_common(compare, true);

    auto* sweep = app.add_subcommand("sweep", "Overhead of kind changes over the configured loop lengths");
    add_common(sweep, true);

    auto* analyze = app.add_subcommand("analyze", "Rank functions of disassembly listings by wide-vector ratio");
    std::vector<std::string> listings;
    double min_ratio = 0.0;
    analyze->add_option("listings", listings, "objdump -d output files")->required();
    analyze->add_option("--min-ratio", min_ratio, "Only show functions with at least this ratio")
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--jobs", opts.jobs, "Worker threads (default: all)");
    analyze->add_option("--report", report, "Write the rows as JSON here");
    analyze->add_flag("--json", opts.json, "Print JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    for (auto* sub : {simulate, compare, sweep})
        if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
    if (!trace.empty()) opts.trace = trace;
    if (!folded.empty()) opts.folded = folded;
    if (!report.empty()) opts.report = report;

    if (simulate->parsed()) return cmd_simulate(config, opts, std::cout, std::cerr);
    if (compare->parsed()) return cmd_compare(config, opts, std::cout, std::cerr);
    if (sweep->parsed()) return cmd_sweep(config, opts, std::cout, std::cerr);
    std::vector<std::filesystem::path> paths(listings.begin(), listings.end());
    return cmd_analyze(paths, min_ratio, opts, std::cout, std::cerr);
}

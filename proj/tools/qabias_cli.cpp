// Copyright 2026 The qabias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qabias: instance generation, single runs, sweeps, and reports.
//
// Exit codes: 0 success, 1 input error, 2 capability/resource error,
// 3 partial failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qabias/annealing.hpp"
#include "qabias/errors.hpp"
#include "qabias/exact_cover.hpp"
#include "qabias/instance_io.hpp"
#include "qabias/metrics.hpp"
#include "qabias/protocols.hpp"
#include "qabias/report.hpp"
#include "qabias/rng.hpp"
#include "qabias/sweep.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace qabias;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitCapability = 2;
constexpr int kExitPartial = 3;

struct GenArgs {
    int n = 10;
    std::optional<int> m;
    int count = 1;
    std::uint64_t seed = 1;
    std::uint64_t retry_budget = 1000000;
    std::string out = ".";
};

int cmd_gen(const GenArgs &args) {
    const int m = args.m.value_or(default_clause_count(args.n));
    fs::create_directories(args.out);
    std::uint64_t attempt = 0, attempts = 0;
    int written = 0;
    while (written < args.count && attempts < args.retry_budget) {
        SearchOutcome found = find_instance(args.n, m, args.seed, attempt, args.retry_budget - attempts);
        attempts += found.attempts;
        attempt = found.next_attempt;
        if (!found.instance) {
            break;
        }
        char name[64];
        std::snprintf(name, sizeof name, "inst_%d_%04d.json", args.n, written);
        save_instance(*found.instance, fs::path(args.out) / name);
        ++written;
    }
    const double rate = attempts > 0 ? static_cast<double>(written) / static_cast<double>(attempts) : 0.0;
    std::cout << "n=" << args.n << " m=" << m << " wrote " << written << " instance(s); acceptance rate "
              << rate << " (" << written << "/" << attempts << " draws)\n";
    if (written < args.count) {
        std::cerr << "error: retry budget of " << args.retry_budget << " draws exhausted after " << written << " of "
                  << args.count << " instances\n";
        return kExitPartial;
    }
    return 0;
}

struct RunArgs {
    std::string instance;
    std::string protocol = "standard";
    std::optional<int> d;
    std::optional<std::string> guess;
    double h = kDefaultAntibiasStrength;
    double tau = 1.0, b0 = 50.0, a = 1.0, dt = 0.0;
    int max_iters = kDefaultMaxIters;
    int max_steps = kDefaultMaxSteps;
    std::uint64_t seed = 1;
    std::string stop = "sample";
};

ordered_json record_json(const RunRecord &r) {
    ordered_json j;
    j["alpha"] = r.alpha;
    j["success_prob"] = r.success_prob;
    j["final_config"] = r.final_config.bits();
    j["final_cost"] = r.final_cost;
    j["hamming_to_solution"] = r.hamming_to_solution;
    j["magnetizations"] = r.magnetizations;
    if (r.sampled_config) {
        j["sampled_config"] = r.sampled_config->bits();
        j["sampled_cost"] = *r.sampled_cost;
        j["sample_seed"] = std::to_string(r.sample_seed);
    }
    j["bias"] = r.bias_used.values();
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

int cmd_run(const RunArgs &args) {
    const Instance inst = load_instance(args.instance);
    const Protocol protocol = protocol_from_string(args.protocol);
    const Schedule sched(args.b0, args.tau, args.a, args.dt);
    if (args.stop != "sample" && args.stop != "expectation") {
        throw InputError("--stop must be sample or expectation");
    }
    const Annealer annealer(inst, sched);

    ordered_json params;
    ProtocolResult result;
    switch (protocol) {
        case Protocol::standard:
            result = run_standard(annealer, args.seed);
            break;
        case Protocol::biased: {
            SpinConfig guess;
            if (args.guess && args.d) {
                throw InputError("give either --guess or --d for the biased protocol, not both");
            }
            if (args.guess) {
                guess = SpinConfig::from_bits(*args.guess);
            } else {
                const int d = args.d.value_or(0);
                guess = flip_d_spins(inst.solution, d, guess_seed(args.seed, inst.seed, d));
                params["d"] = d;
            }
            params["guess"] = guess.bits();
            result = run_biased(annealer, guess, args.seed);
            break;
        }
        case Protocol::iterative:
            params["max_iters"] = args.max_iters;
            result = run_iterative(annealer, args.seed, args.max_iters);
            break;
        case Protocol::antibias:
            params["h"] = args.h;
            params["max_steps"] = args.max_steps;
            params["stop"] = args.stop;
            result = run_antibias(annealer, args.seed, args.h, args.max_steps,
                                  args.stop == "sample" ? AntibiasStop::sample : AntibiasStop::expectation);
            break;
    }
    const ProtocolResult standard = run_standard(annealer, args.seed);
    const std::vector<ResultSummary> res{summarize(result, inst.seed)};
    const std::vector<ResultSummary> st{summarize(standard, inst.seed)};
    const EnsembleStats stats = metrics(res, st);

    ordered_json doc;
    ordered_json prov;
    prov["code_version"] = QABIAS_VERSION;
    prov["instance_file"] = args.instance;
    prov["n"] = inst.n;
    prov["m"] = inst.m();
    prov["instance_seed"] = std::to_string(inst.seed);
    prov["protocol"] = std::string(to_string(protocol));
    prov["master_seed"] = std::to_string(args.seed);
    prov["schedule"] = {{"b0", sched.b0()},
                        {"tau", sched.tau()},
                        {"a", sched.a()},
                        {"dt", sched.step()},
                        {"steps", sched.steps()},
                        {"total_time", sched.total_time()}};
    prov["params"] = params;
    prov["bias_cap"] = BiasField::kDefaultCap;
    doc["provenance"] = prov;
    doc["terminated_by"] = std::string(to_string(result.terminated_by));
    doc["steps_used"] = result.steps_used();
    doc["bias_capped"] = result.bias_capped;
    ordered_json records = ordered_json::array();
    for (const auto &r : result.records) {
        records.push_back(record_json(r));
    }
    doc["records"] = records;
    doc["metrics"] = {{"p_final", stats.p_final.mean},
                      {"p_bar", stats.p_bar},
                      {"p_standard", stats.p_standard.mean},
                      {"gamma", std::isfinite(stats.gamma) ? ordered_json(stats.gamma) : ordered_json(nullptr)},
                      {"tau_standard", std::isfinite(stats.tau_standard) ? ordered_json(stats.tau_standard)
                                                                         : ordered_json(nullptr)},
                      {"hamming_final", stats.hamming_final.mean},
                      {"cost_final", stats.cost_final.mean}};
    std::cout << doc.dump(2) << '\n';
    return 0;
}

struct SweepArgs {
    std::string spec;
    std::optional<int> jobs;
    std::optional<std::string> out;
    bool quiet = false;
};

int cmd_sweep(const SweepArgs &args) {
    SweepSpec spec = SweepSpec::load(args.spec);
    if (args.jobs) {
        spec.jobs = *args.jobs;
    }
    if (args.out) {
        spec.out = *args.out;
    }
    spec.validate();
    SweepOptions options;
    if (!args.quiet) {
        options.progress = [](const std::string &msg) { std::cerr << msg << '\n'; };
    }
    const SweepOutcome outcome = run_sweep(spec, options);
    std::cout << "sweep: " << outcome.instances_total << " instances, " << outcome.instances_skipped
              << " resumed, " << outcome.instances_run << " run, " << outcome.failures.size() << " failed -> "
              << spec.out.string() << '\n';
    for (const auto &f : outcome.failures) {
        std::cerr << "failed: " << f << '\n';
    }
    return outcome.failures.empty() ? 0 : kExitPartial;
}

int cmd_report(const std::vector<std::string> &files) {
    std::vector<ReportRow> rows;
    for (const auto &f : files) {
        auto more = load_report_rows(f);
        rows.insert(rows.end(), more.begin(), more.end());
    }
    print_report(rows, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum annealing with longitudinal bias fields on exact-cover instances"};
    app.require_subcommand(1);

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate certified unique-solution instances");
    gen_cmd->add_option("--n", gen.n, "Spin count")->required();
    gen_cmd->add_option("--m", gen.m, "Clause count (default round(0.7 n))");
    gen_cmd->add_option("--count", gen.count, "Instances to write")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Master seed");
    gen_cmd->add_option("--retry-budget", gen.retry_budget, "Maximum clause-set draws");
    gen_cmd->add_option("--out", gen.out, "Output directory");

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Run one protocol on one instance; JSON on stdout");
    run_cmd->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    run_cmd->add_option("instance", run.instance, "Instance JSON file")->required();
    run_cmd->add_option("--protocol", run.protocol, "standard | biased | iterative | antibias");
    run_cmd->add_option("--d", run.d, "Biased: flip d spins of the solution to form the guess");
    run_cmd->add_option("--guess", run.guess, "Biased: explicit guess bit string");
    run_cmd->add_option("--h", run.h, "Antibias strength");
    run_cmd->add_option("--tau", run.tau, "Ramp time constant");
    run_cmd->add_option("--b0", run.b0, "Initial driver amplitude B(0)");
    run_cmd->add_option("--a", run.a, "Problem amplitude A");
    run_cmd->add_option("--dt", run.dt, "Integrator step (default 5e-4 tau)");
    run_cmd->add_option("--max-iters", run.max_iters, "Iterative cap");
    run_cmd->add_option("--max-steps", run.max_steps, "Antibias cap");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--stop", run.stop, "Antibias stop rule: sample | expectation");

    SweepArgs sweep;
    auto *sweep_cmd = app.add_subcommand("sweep", "Run a sweep spec; writes runs.csv, stats.json, *.dat");
    sweep_cmd->add_option("spec", sweep.spec, "Sweep spec JSON")->required();
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (0 = all cores)");
    sweep_cmd->add_option("--out", sweep.out, "Output directory (overrides the spec)");
    sweep_cmd->add_flag("--quiet", sweep.quiet, "No progress output");

    std::vector<std::string> report_files;
    auto *report_cmd = app.add_subcommand("report", "Print stats.json files as a table");
    report_cmd->add_option("stats", report_files, "stats.json files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*gen_cmd) {
            return cmd_gen(gen);
        }
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*sweep_cmd) {
            return cmd_sweep(sweep);
        }
        if (*report_cmd) {
            return cmd_report(report_files);
        }
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const CapabilityError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapability;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapability;
    }
    return 0;
}

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

#include "qabias/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "qabias/errors.hpp"

using namespace qabias;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("qabias_sweep_test_" + name);
    fs::remove_all(dir);
    return dir;
}

SweepSpec small_spec(const fs::path &out) {
    SweepSpec spec;
    spec.sizes = {6, 7};
    spec.instances_per_size = 4;
    spec.protocols = {Protocol::standard, Protocol::biased, Protocol::iterative, Protocol::antibias};
    spec.d_values = {0, 2};
    spec.dt = 5e-3;
    spec.master_seed = 3;
    spec.jobs = 2;
    spec.out = out;
    return spec;
}

}  // namespace

TEST(sweep_spec, json_round_trip) {
    SweepSpec spec = small_spec("x");
    spec.m_per_size = {{6, 4}, {7, 5}};
    const SweepSpec back = SweepSpec::from_json(spec.to_json());
    EXPECT_EQ(back.to_json(), spec.to_json());
    EXPECT_EQ(back.clauses_for(7), 5);
    EXPECT_EQ(small_spec("x").clauses_for(10), 7);
}

TEST(sweep_spec, validation_errors) {
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"colour":1})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"instances_per_size":3})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[2]})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"protocol":"greedy"})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"protocol":"biased","d":[11]})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"h":1.5})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"schedule":{"tau":-1}})"), InputError);
    EXPECT_THROW(SweepSpec::from_json(R"({"sizes":[10],"master_seed":"abc"})"), InputError);
    EXPECT_THROW(SweepSpec::from_json("[1,2"), InputError);
    const SweepSpec ok = SweepSpec::from_json(R"({"sizes":[10],"protocol":"antibias","master_seed":"18446744073709551615"})");
    EXPECT_EQ(ok.master_seed, 18446744073709551615ULL);
    EXPECT_TRUE(ok.has(Protocol::antibias));
}

TEST(runs_csv, format_and_parse_round_trip) {
    RunRow r;
    r.instance_id = "n10_0003";
    r.n = 10;
    r.m = 7;
    r.instance_seed = 18446744073709551615ULL;
    r.protocol = Protocol::antibias;
    r.alpha = 3;
    r.success_prob = 0.1 + 0.2;
    r.hamming = 2;
    r.cost = 8;
    r.sample_hamming = 4;
    r.sample_cost = 16;
    r.steps_used = 5;
    r.terminated_by = Termination::solution_found;
    r.run_seed = 12345678901234567ULL;
    const std::string line = format_row(r);
    EXPECT_EQ(line.find("n10_0003,10,7,18446744073709551615,antibias,-,3,"), 0U) << line;
    const RunRow back = parse_row(line, 2);
    EXPECT_EQ(back.success_prob, r.success_prob);
    EXPECT_EQ(back.d, -1);
    EXPECT_EQ(format_row(back), line);
    r.protocol = Protocol::biased;
    r.d = 4;
    EXPECT_EQ(parse_row(format_row(r), 2).d, 4);
    EXPECT_THROW(parse_row("a,b,c", 7), InputError);
    EXPECT_STREQ(kRunsCsvHeader,
                 "instance_id,n,m,instance_seed,protocol,d,alpha,success_prob,hamming,cost,sample_hamming,"
                 "sample_cost,steps_used,terminated_by,run_seed");
}

TEST(sweep, ensemble_is_certified_and_deterministic) {
    const SweepSpec spec = small_spec("x");
    const SizeEnsemble a = generate_ensemble(spec, 7);
    const SizeEnsemble b = generate_ensemble(spec, 7);
    ASSERT_EQ(a.instances.size(), 4U);
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        EXPECT_EQ(a.instances[i].seed, b.instances[i].seed);
        EXPECT_EQ(a.instances[i].m(), 5);
        const auto minima = brute_force_minima(a.instances[i]);
        EXPECT_EQ(minima.min_cost, 0);
        ASSERT_EQ(minima.configs.size(), 1U);
        EXPECT_EQ(minima.configs[0], a.instances[i].solution);
    }
    EXPECT_GT(a.acceptance_rate(), 0.0);
    EXPECT_EQ(instance_id(12, 7), "n12_0007");
}

TEST(sweep, guesses_have_requested_distance) {
    const SweepSpec spec = small_spec("x");
    const SizeEnsemble e = generate_ensemble(spec, 7);
    for (const Instance &inst : e.instances) {
        const auto cells = run_instance_cells(inst, spec);
        ASSERT_EQ(cells.size(), 5U);
        EXPECT_EQ(cells[0].protocol, Protocol::standard);
        for (std::size_t c = 1; c <= 2; ++c) {
            const auto &rec = cells[c].result.final_record();
            int flipped = 0;
            for (int m = 0; m < inst.n; ++m) {
                flipped += rec.bias_used[m] != -inst.solution[m];
            }
            EXPECT_EQ(flipped, cells[c].d);
        }
    }
}

TEST(sweep, outputs_are_reproducible_and_resumable) {
    const fs::path full_dir = scratch_dir("full");
    const fs::path serial_dir = scratch_dir("serial");
    const fs::path resume_dir = scratch_dir("resume");

    const SweepOutcome full = run_sweep(small_spec(full_dir));
    EXPECT_TRUE(full.complete);
    EXPECT_EQ(full.instances_total, 8U);
    const std::string csv = slurp(full_dir / "runs.csv");

    SweepSpec serial = small_spec(serial_dir);
    serial.jobs = 1;
    run_sweep(serial);
    EXPECT_EQ(slurp(serial_dir / "runs.csv"), csv);

    SweepOptions opts;
    opts.stop_after = 3;
    const SweepOutcome partial = run_sweep(small_spec(resume_dir), opts);
    EXPECT_FALSE(partial.complete);
    EXPECT_EQ(partial.instances_run, 3U);
    // Simulate an interrupted write: drop the tail of the last line.
    {
        std::string text = slurp(resume_dir / "runs.csv");
        text.resize(text.size() - 7);
        std::ofstream(resume_dir / "runs.csv", std::ios::binary) << text;
    }
    const SweepOutcome resumed = run_sweep(small_spec(resume_dir));
    EXPECT_TRUE(resumed.complete);
    EXPECT_EQ(resumed.instances_skipped, 2U);
    EXPECT_EQ(slurp(resume_dir / "runs.csv"), csv);
    const SweepOutcome again = run_sweep(small_spec(resume_dir));
    EXPECT_EQ(again.instances_skipped, 8U);
    EXPECT_EQ(slurp(resume_dir / "runs.csv"), csv);

    SweepSpec other = small_spec(resume_dir);
    other.master_seed = 4;
    EXPECT_THROW(run_sweep(other), InputError);

    for (const char *name : {"fig1a.dat", "fig1b.dat", "fig2a.dat", "fig2b.dat", "fig3.dat", "table1.dat"}) {
        const std::string text = slurp(full_dir / name);
        ASSERT_FALSE(text.empty()) << name;
        EXPECT_EQ(text[0], '#') << name;
    }

    // Aggregation is a pure function of runs.csv.
    const auto rows = read_runs_csv(full_dir / "runs.csv");
    const auto stats = aggregate(rows, 0.05);
    ASSERT_EQ(stats.size(), full.stats.size());
    ASSERT_EQ(stats.size(), 10U);
    for (std::size_t i = 0; i < stats.size(); ++i) {
        EXPECT_EQ(stats[i].stats.p_final.mean, full.stats[i].stats.p_final.mean);
        EXPECT_EQ(stats[i].stats.gamma, full.stats[i].stats.gamma);
    }
    const std::string stats_text = slurp(full_dir / "stats.json");
    EXPECT_NE(stats_text.find("\"cells\""), std::string::npos);
    EXPECT_NE(stats_text.find("\"generated_at\""), std::string::npos);

    for (const auto &d : {full_dir, serial_dir, resume_dir}) {
        fs::remove_all(d);
    }
}

TEST(sweep, standard_rows_match_direct_runs) {
    const fs::path dir = scratch_dir("direct");
    SweepSpec spec = small_spec(dir);
    spec.sizes = {6};
    spec.protocols = {Protocol::standard};
    run_sweep(spec);
    const auto rows = read_runs_csv(dir / "runs.csv");
    const SizeEnsemble e = generate_ensemble(spec, 6);
    ASSERT_EQ(rows.size(), e.instances.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto direct = run_standard(e.instances[i], spec.schedule(), spec.master_seed);
        EXPECT_EQ(rows[i].success_prob, direct.final_record().success_prob);
        EXPECT_EQ(rows[i].run_seed, run_seed(spec.master_seed, e.instances[i].seed, 1));
    }
    fs::remove_all(dir);
}

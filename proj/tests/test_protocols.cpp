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

#include "qabias/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "qabias/errors.hpp"
#include "qabias/rng.hpp"

using namespace qabias;

namespace {

Instance certified(int n, std::uint64_t seed) {
    return *find_instance(n, default_clause_count(n), seed, 0, 1000000).instance;
}

void expect_same(const ProtocolResult &a, const ProtocolResult &b) {
    ASSERT_EQ(a.steps_used(), b.steps_used());
    EXPECT_EQ(a.terminated_by, b.terminated_by);
    for (int i = 0; i < a.steps_used(); ++i) {
        EXPECT_EQ(a.records[i].success_prob, b.records[i].success_prob);
        EXPECT_EQ(a.records[i].final_config, b.records[i].final_config);
        EXPECT_EQ(*a.records[i].sampled_config, *b.records[i].sampled_config);
        EXPECT_EQ(a.records[i].bias_used, b.records[i].bias_used);
    }
}

}  // namespace

TEST(protocols, names_round_trip) {
    for (auto p : {Protocol::standard, Protocol::biased, Protocol::iterative, Protocol::antibias}) {
        EXPECT_EQ(protocol_from_string(to_string(p)), p);
    }
    for (auto t : {Termination::fixed_point, Termination::solution_found, Termination::step_cap}) {
        EXPECT_EQ(termination_from_string(to_string(t)), t);
    }
    EXPECT_EQ(to_string(Termination::step_cap), "step-cap");
    EXPECT_THROW(protocol_from_string("greedy"), InputError);
}

TEST(protocols, run_seeds_differ_by_alpha) {
    EXPECT_NE(run_seed(1, 2, 1), run_seed(1, 2, 2));
    EXPECT_NE(run_seed(1, 2, 1), run_seed(1, 3, 1));
    EXPECT_NE(run_seed(1, 2, 1), run_seed(2, 2, 1));
    EXPECT_EQ(run_seed(1, 2, 1), derive_seed({1, 2, 1}));
}

TEST(protocols, standard_is_one_unbiased_run) {
    const Instance inst = certified(8, 1);
    const Annealer annealer(inst, Schedule(50.0, 1.0, 1.0, 2e-3));
    const ProtocolResult r = run_standard(annealer, 77);
    ASSERT_EQ(r.steps_used(), 1);
    EXPECT_EQ(r.terminated_by, Termination::fixed_point);
    EXPECT_EQ(r.records[0].alpha, 1);
    EXPECT_TRUE(r.records[0].bias_used.is_zero());
    EXPECT_EQ(r.records[0].sample_seed, run_seed(77, inst.seed, 1));
    expect_same(r, run_standard(inst, Schedule(50.0, 1.0, 1.0, 2e-3), 77));
}

TEST(protocols, standard_adiabatic) {
    const Instance inst = certified(6, 21);
    EXPECT_GT(run_standard(inst, Schedule(50.0, 30.0), 1).final_record().success_prob, 0.99);
}

TEST(protocols, biased_uses_negated_guess) {
    const Instance inst = certified(9, 4);
    const Annealer annealer(inst, Schedule());
    const ProtocolResult r = run_biased(annealer, inst.solution, 5);
    ASSERT_EQ(r.steps_used(), 1);
    EXPECT_EQ(r.records[0].bias_used, BiasField::toward(inst.solution));
    EXPECT_EQ(r.records[0].bias_used[0], -inst.solution[0]);
    EXPECT_GT(r.final_record().success_prob, 0.95);
    EXPECT_THROW(run_biased(annealer, SpinConfig::all_up(8), 5), InputError);
}

TEST(protocols, iterative_bookkeeping) {
    const Schedule sched(50.0, 1.0, 1.0, 2e-3);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Instance inst = certified(8, 100 + seed);
        const Annealer annealer(inst, sched);
        const ProtocolResult r = run_iterative(annealer, 3);
        ASSERT_GE(r.steps_used(), 2);
        EXPECT_LE(r.steps_used(), kDefaultMaxIters);
        EXPECT_TRUE(r.records[0].bias_used.is_zero());
        for (int a = 1; a < r.steps_used(); ++a) {
            EXPECT_EQ(r.records[a].alpha, a + 1);
            EXPECT_EQ(r.records[a].bias_used, BiasField::toward(r.records[a - 1].final_config));
        }
        for (int a = 2; a < r.steps_used(); ++a) {
            EXPECT_NE(r.records[a - 1].final_config, r.records[a - 2].final_config);
        }
        const auto &last = r.records[r.steps_used() - 1];
        const auto &prev = r.records[r.steps_used() - 2];
        if (r.terminated_by == Termination::fixed_point) {
            EXPECT_EQ(last.final_config, prev.final_config);
        } else {
            EXPECT_EQ(r.terminated_by, Termination::step_cap);
            EXPECT_EQ(r.steps_used(), kDefaultMaxIters);
        }
        for (const auto &rec : r.records) {
            EXPECT_EQ(rec.final_cost, cost_of_config(inst, rec.final_config));
        }
        expect_same(r, run_iterative(annealer, 3));
    }
}

TEST(protocols, iterative_cap_and_validation) {
    const Instance inst = certified(7, 3);
    const Annealer annealer(inst, Schedule(50.0, 1.0, 1.0, 2e-3));
    EXPECT_THROW(run_iterative(annealer, 1, 1), InputError);
    const ProtocolResult r = run_iterative(annealer, 1, 2);
    EXPECT_EQ(r.steps_used(), 2);
    EXPECT_EQ(r.terminated_by, r.records[1].final_config == r.records[0].final_config ? Termination::fixed_point
                                                                                       : Termination::step_cap);
}

TEST(protocols, antibias_accumulates_samples) {
    const Schedule sched(50.0, 1.0, 1.0, 2e-3);
    const double h = 0.1;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Instance inst = certified(9, 200 + seed);
        const ProtocolResult r = run_antibias(inst, sched, seed, h, 30);
        std::vector<int> sum(static_cast<std::size_t>(inst.n), 0);
        for (int a = 0; a < r.steps_used(); ++a) {
            const RunRecord &rec = r.records[a];
            EXPECT_EQ(rec.alpha, a + 1);
            EXPECT_EQ(rec.sample_seed, run_seed(seed, inst.seed, a + 1));
            for (int m = 0; m < inst.n; ++m) {
                EXPECT_DOUBLE_EQ(rec.bias_used[m], h * sum[m]);
            }
            ASSERT_TRUE(rec.sampled_cost.has_value());
            const bool last = a + 1 == r.steps_used();
            if (!last) {
                EXPECT_NE(*rec.sampled_cost, 0);
            }
            for (int m = 0; m < inst.n; ++m) {
                sum[m] += (*rec.sampled_config)[m];
            }
        }
        if (r.terminated_by == Termination::solution_found) {
            EXPECT_EQ(*r.final_record().sampled_cost, 0);
            EXPECT_EQ(*r.final_record().sampled_config, inst.solution);
        } else {
            EXPECT_EQ(r.steps_used(), 30);
        }
        expect_same(r, run_antibias(inst, sched, seed, h, 30));
    }
}

TEST(protocols, antibias_expectation_stop) {
    const Instance inst = certified(8, 7);
    const ProtocolResult r =
        run_antibias(inst, Schedule(50.0, 1.0, 1.0, 2e-3), 9, 0.1, 40, AntibiasStop::expectation);
    for (int a = 0; a + 1 < r.steps_used(); ++a) {
        EXPECT_NE(r.records[a].final_cost, 0);
    }
    if (r.terminated_by == Termination::solution_found) {
        EXPECT_EQ(r.final_record().final_cost, 0);
    }
}

TEST(protocols, antibias_validation) {
    const Instance inst = certified(6, 1);
    const Schedule sched(50.0, 1.0, 1.0, 5e-3);
    EXPECT_THROW(run_antibias(inst, sched, 1, 0.0), InputError);
    EXPECT_THROW(run_antibias(inst, sched, 1, 1.0), InputError);
    EXPECT_THROW(run_antibias(inst, sched, 1, 0.1, 0), InputError);
    EXPECT_EQ(run_antibias(inst, sched, 1, 0.1, 1).steps_used(), 1);
}

TEST(protocols, antibias_bias_is_capped) {
    const Instance inst = certified(6, 2);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const ProtocolResult r = run_antibias(inst, Schedule(50.0, 0.05, 1.0, 5e-4), seed, 0.99, 40);
        std::vector<int> sum(6, 0);
        bool over = false;
        for (const auto &rec : r.records) {
            for (int m = 0; m < 6; ++m) {
                const double raw = 0.99 * sum[m];
                over = over || std::abs(raw) > BiasField::kDefaultCap;
                EXPECT_DOUBLE_EQ(rec.bias_used[m], std::clamp(raw, -BiasField::kDefaultCap, BiasField::kDefaultCap));
                sum[m] += (*rec.sampled_config)[m];
            }
        }
        EXPECT_EQ(r.bias_capped, over);
    }
}

TEST(protocols, vanishing_antibias_steps_are_geometric) {
    // With h -> 0 every run is the standard run; each sample hits the solution with
    // probability p, so steps_used ~ Geometric(p).
    const Instance inst = certified(6, 12);
    const Annealer annealer(inst, Schedule(50.0, 1.0, 1.0, 5e-3));
    const double p = annealer.run(BiasField::zeros(inst.n), false, 0).success_prob;
    ASSERT_GT(p, 0.1);
    ASSERT_LT(p, 0.9);
    const int trials = 600;
    std::vector<int> bins(5, 0);  // steps 1, 2, 3, 4, >=5
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ProtocolResult r = run_antibias(annealer, static_cast<std::uint64_t>(t), 1e-12, 100);
        ASSERT_EQ(r.terminated_by, Termination::solution_found);
        total += r.steps_used();
        ++bins[static_cast<std::size_t>(std::min(r.steps_used(), 5) - 1)];
    }
    double chi2 = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const double prob = k < 5 ? std::pow(1.0 - p, k - 1) * p : std::pow(1.0 - p, 4);
        const double expected = prob * trials;
        chi2 += (bins[k - 1] - expected) * (bins[k - 1] - expected) / expected;
    }
    EXPECT_LT(chi2, 18.467);  // chi-square, 4 dof, significance 0.001
    const double mean = total / trials;
    const double se = std::sqrt((1.0 - p) / (p * p) / trials);
    EXPECT_NEAR(mean, 1.0 / p, 4.0 * se) << "p=" << p;
}

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

#include "qabias/state.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gtest/gtest.h"
#include "qabias/errors.hpp"
#include "qabias/rng.hpp"

using namespace qabias;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Amplitude> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : amps) {
        a = Amplitude(rng.uniform() - 0.5, rng.uniform() - 0.5);
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return StateVector::from_amplitudes(std::move(amps));
}

BiasField random_bias(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> h(static_cast<std::size_t>(n));
    for (auto &v : h) {
        v = 4.0 * rng.uniform() - 2.0;
    }
    return BiasField(h);
}

VectorXcd to_eigen(const StateVector &s) {
    VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t k = 0; k < s.dimension(); ++k) {
        v(static_cast<Eigen::Index>(k)) = s[k];
    }
    return v;
}

// Dense sigma operators on n spins, basis index bit m <-> spin m, bit 1 <-> s = +1.
MatrixXcd sigma_x(int n, int m) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        out(k ^ (Eigen::Index{1} << m), k) = 1.0;
    }
    return out;
}

MatrixXcd sigma_z(int n, int m) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        out(k, k) = ((k >> m) & 1) ? 1.0 : -1.0;
    }
    return out;
}

Instance small_instance(int n, std::uint64_t seed) {
    return *find_instance(n, default_clause_count(n), seed, 0, 1000000).instance;
}

}  // namespace

TEST(state, diagonal_table_three_spin_clause) {
    Instance inst;
    inst.n = 3;
    inst.clauses = {Clause::make(0, 1, 2)};
    // Independent evaluation of (s0 + s1 + s2 - 1)^2 with s = 2 * bit - 1.
    std::vector<double> expected;
    for (int k = 0; k < 8; ++k) {
        const int sum = (2 * (k & 1) - 1) + (2 * ((k >> 1) & 1) - 1) + (2 * ((k >> 2) & 1) - 1);
        expected.push_back((sum - 1) * (sum - 1));
    }
    ASSERT_EQ(expected, (std::vector<double>{16, 4, 4, 0, 4, 0, 0, 4}));
    EXPECT_EQ(build_diagonal(inst).values, expected);
}

TEST(state, diagonal_table_empty_and_solution) {
    Instance empty;
    empty.n = 5;
    const auto t = build_diagonal(empty);
    EXPECT_EQ(t.values, std::vector<double>(32, 0.0));

    const Instance inst = small_instance(8, 1);
    const auto table = build_diagonal(inst);
    EXPECT_EQ(table.values[inst.solution.index()], 0.0);
    EXPECT_EQ(*std::min_element(table.values.begin(), table.values.end()), 0.0);
    for (std::uint64_t k = 0; k < table.values.size(); k += 7) {
        EXPECT_EQ(table.values[k], static_cast<double>(cost_of_config(inst, SpinConfig::from_index(8, k))));
    }
    Instance big;
    big.n = kMaxSimulatorSpins + 1;
    EXPECT_THROW(build_diagonal(big), CapabilityError);
}

TEST(state, initial_state_single_spin) {
    const auto s0 = initial_state(1, BiasField::zeros(1));
    // Index 0 is s = -1, index 1 is s = +1.
    EXPECT_NEAR(s0[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s0[0].real(), -1.0 / std::sqrt(2.0), 1e-15);

    // Reference: lowest eigenvector of [[h, 1], [1, -h]] in the (s=+1, s=-1) basis.
    for (double h : {-1.0, -0.3, 0.0, 0.7, 2.5}) {
        Eigen::Matrix2d m;
        m << h, 1.0, 1.0, -h;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
        Eigen::Vector2d g = es.eigenvectors().col(0);
        if (g(0) < 0) {
            g = -g;
        }
        const auto s = initial_state(1, BiasField({h}));
        EXPECT_NEAR(s[1].real(), g(0), 1e-12) << h;
        EXPECT_NEAR(s[0].real(), g(1), 1e-12) << h;
        EXPECT_NEAR(s[1].imag(), 0.0, 0.0);
    }
    const auto s = initial_state(1, BiasField({-1.0}));
    EXPECT_NEAR(std::norm(s[1]), 0.8535533905932737, 1e-12);
    EXPECT_NEAR(s[0].real() / s[1].real(), 1.0 - std::sqrt(2.0), 1e-12);
}

TEST(state, initial_state_is_product) {
    const auto s = initial_state(2, BiasField::zeros(2));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(s[k]), 0.5, 1e-15);
    }
    const BiasField h = random_bias(5, 3);
    const auto full = initial_state(5, h);
    EXPECT_NEAR(full.norm_squared(), 1.0, 1e-14);
    for (std::uint64_t k = 0; k < 32; ++k) {
        Amplitude expected = 1.0;
        for (int m = 0; m < 5; ++m) {
            const auto single = initial_state(1, BiasField({h[m]}));
            expected *= single[(k >> m) & 1];
        }
        EXPECT_NEAR(std::abs(full[k] - expected), 0.0, 1e-14);
    }
    EXPECT_THROW(initial_state(3, BiasField::zeros(2)), InputError);
}

TEST(state, magnetization_examples) {
    const auto basis = StateVector::basis(4, 0b0101);
    EXPECT_EQ(magnetization(basis, 0), 1.0);
    EXPECT_EQ(magnetization(basis, 1), -1.0);
    const auto uniform = initial_state(4, BiasField::zeros(4));
    for (int m = 0; m < 4; ++m) {
        EXPECT_NEAR(magnetization(uniform, m), 0.0, 1e-12);
    }
    const auto biased = initial_state(3, BiasField({0.0, -1.0, 0.0}));
    EXPECT_NEAR(magnetization(biased, 1), 2 * 0.8535533905932737 - 1, 1e-12);
    EXPECT_NEAR(magnetization(biased, 1), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_THROW(magnetization(biased, 3), InputError);
    EXPECT_THROW(magnetization(biased, -1), InputError);
}

TEST(state, magnetization_matches_dense_expectation) {
    for (int n = 1; n <= 4; ++n) {
        const auto s = random_state(n, 100 + n);
        const VectorXcd v = to_eigen(s);
        for (int m = 0; m < n; ++m) {
            const double expected = (v.adjoint() * sigma_z(n, m) * v)(0).real();
            EXPECT_NEAR(magnetization(s, m), expected, 1e-13);
        }
    }
}

TEST(state, overlap_examples) {
    const SpinConfig cfg = SpinConfig::from_bits("101");
    EXPECT_EQ(overlap_probability(StateVector::basis(3, cfg.index()), cfg), 1.0);
    EXPECT_EQ(overlap_probability(StateVector::basis(3, 0), cfg), 0.0);
    EXPECT_NEAR(overlap_probability(initial_state(3, BiasField::zeros(3)), cfg), 1.0 / 8, 1e-15);
    EXPECT_THROW(overlap_probability(StateVector::basis(2, 0), cfg), InputError);
}

TEST(state, diagonal_phase_identity_cases_and_norm) {
    const Instance inst = small_instance(5, 4);
    const auto table = build_diagonal(inst);
    const auto s = random_state(5, 9);
    auto t = s;
    apply_diagonal_phase(t, table, random_bias(5, 1), 1.0, 3.0, 0.0);
    for (std::size_t k = 0; k < s.dimension(); ++k) {
        EXPECT_EQ(t[k], s[k]);
    }
    DiagonalTable zeros{5, std::vector<double>(32, 0.0)};
    t = s;
    apply_diagonal_phase(t, zeros, BiasField::zeros(5), 1.0, 3.0, 0.7);
    for (std::size_t k = 0; k < s.dimension(); ++k) {
        EXPECT_EQ(t[k], s[k]);
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto r = random_state(5, seed);
        apply_diagonal_phase(r, table, random_bias(5, seed), 1.3, 7.0, 0.37);
        EXPECT_NEAR(r.norm_squared(), 1.0, 1e-12);
    }
}

TEST(state, transverse_rotation_examples) {
    auto s = StateVector::basis(1, 1);  // s = +1 is the first component of the (1, 0) example
    auto r = StateVector::basis(1, 0);
    apply_transverse_rotation(r, 1.0, std::numbers::pi / 2);
    EXPECT_NEAR(std::abs(r[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(r[1] - Amplitude(0, -1)), 0.0, 1e-15);
    apply_transverse_rotation(s, 1.0, 0.0);
    EXPECT_EQ(s[1], Amplitude(1.0));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = random_state(6, seed);
        apply_transverse_rotation(x, 37.0, 0.013 * static_cast<double>(seed + 1));
        EXPECT_NEAR(x.norm_squared(), 1.0, 1e-12);
    }
}

TEST(state, split_operators_match_dense_exponentials) {
    for (int n = 1; n <= 4; ++n) {
        const Eigen::Index dim = Eigen::Index{1} << n;
        Instance use;
        use.n = n;
        if (n == 3) {
            use.clauses = {Clause::make(0, 1, 2)};
        } else if (n == 4) {
            use = small_instance(4, 2);
        }
        const auto table = build_diagonal(use);
        const BiasField h = random_bias(n, 5 + n);
        const double a = 1.0, b = 4.2, dt = 0.031;

        MatrixXcd gen_diag = MatrixXcd::Zero(dim, dim);
        MatrixXcd gen_x = MatrixXcd::Zero(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            gen_diag(k, k) = a * table.values[static_cast<std::size_t>(k)];
        }
        for (int m = 0; m < n; ++m) {
            gen_diag += b * h[m] * sigma_z(n, m);
            gen_x += b * sigma_x(n, m);
        }
        const Amplitude minus_i(0.0, -1.0);
        const MatrixXcd u_diag = (minus_i * dt * gen_diag).exp();
        const MatrixXcd u_x = (minus_i * dt * gen_x).exp();

        const auto s = random_state(n, 77 + n);
        auto d = s;
        apply_diagonal_phase(d, table, h, a, b, dt);
        const VectorXcd want_d = u_diag * to_eigen(s);
        auto x = s;
        apply_transverse_rotation(x, b, dt);
        const VectorXcd want_x = u_x * to_eigen(s);
        for (Eigen::Index k = 0; k < dim; ++k) {
            EXPECT_NEAR(std::abs(d[static_cast<std::size_t>(k)] - want_d(k)), 0.0, 1e-10) << n;
            EXPECT_NEAR(std::abs(x[static_cast<std::size_t>(k)] - want_x(k)), 0.0, 1e-10) << n;
        }
    }
}

TEST(state, sample_basis_state_is_certain) {
    const auto basis = StateVector::basis(5, 19);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        EXPECT_EQ(sample_config(basis, seed).index(), 19U);
    }
}

TEST(state, sample_uniform_two_spin_frequencies) {
    const auto uniform = initial_state(2, BiasField::zeros(2));
    std::vector<int> counts(4, 0);
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
        ++counts[sample_config(uniform, derive_seed({17, static_cast<std::uint64_t>(i)})).index()];
    }
    for (int c : counts) {
        EXPECT_NEAR(c / double(samples), 0.25, 0.01);
    }
}

TEST(state, sample_is_deterministic) {
    const auto s = random_state(6, 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_EQ(sample_config(s, seed), sample_config(s, seed));
    }
}

TEST(state, bias_field_validation) {
    EXPECT_THROW(BiasField({0.0, std::nan("")}), InputError);
    EXPECT_THROW(BiasField({10.5}), InputError);
    EXPECT_NO_THROW(BiasField({-10.0, 10.0}));
    const auto toward = BiasField::toward(SpinConfig::from_bits("10"));
    EXPECT_EQ(toward.values(), (std::vector<double>{-1.0, 1.0}));
    EXPECT_TRUE(BiasField::zeros(3).is_zero());
    EXPECT_FALSE(toward.is_zero());
}

TEST(state, text_dump_round_trip_is_exact) {
    const auto state = initial_state(3, BiasField(std::vector<double>{0.3, -1.0 / 3.0, 0.0}));
    std::stringstream ss;
    write_state_text(ss, state);
    const auto back = read_state_text(ss);
    ASSERT_EQ(back.n(), 3);
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        EXPECT_EQ(back[k], state[k]);
    }
    std::istringstream truncated("2\n1 0\n0 0\n");
    EXPECT_THROW(read_state_text(truncated), InputError);
}

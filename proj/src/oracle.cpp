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

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qabias/annealing.hpp"
#include "qabias/errors.hpp"

namespace qabias {

StateVector dense_propagator_oracle(const Instance &inst, const BiasField &bias, const Schedule &sched,
                                    double dt_ref) {
    const int n = inst.n;
    if (n > kMaxOracleSpins) {
        throw CapabilityError("dense propagator oracle supports n <= " + std::to_string(kMaxOracleSpins) +
                              ", got n=" + std::to_string(n));
    }
    if (bias.size() != n) {
        throw InputError("oracle: bias length does not match n");
    }
    const Schedule ref = sched.with_step(dt_ref);
    const Eigen::Index dim = Eigen::Index{1} << n;

    const DiagonalTable table = build_diagonal(inst);
    Eigen::MatrixXd problem = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd driver = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        problem(k, k) = table.values[static_cast<std::size_t>(k)];
        for (int m = 0; m < n; ++m) {
            const Eigen::Index flip = k ^ (Eigen::Index{1} << m);
            driver(flip, k) += 1.0;  // sigma^x_m
            const double s = ((k >> m) & 1) ? 1.0 : -1.0;
            driver(k, k) += bias[m] * s;  // h_m sigma^z_m
        }
    }

    const StateVector init = initial_state(n, bias);
    Eigen::VectorXd re(dim), im(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        re(k) = init[static_cast<std::size_t>(k)].real();
        im(k) = init[static_cast<std::size_t>(k)].imag();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dim);
    const double dt = ref.step();
    for (std::int64_t j = 0; j < ref.steps(); ++j) {
        const double t = (static_cast<double>(j) + 0.5) * dt;
        const Eigen::MatrixXd h = ref.a_at(t) * problem + ref.b_at(t) * driver;
        solver.compute(h);
        const Eigen::MatrixXd &v = solver.eigenvectors();
        const Eigen::VectorXd &lambda = solver.eigenvalues();
        // psi <- V exp(-i dt Lambda) V^T psi
        Eigen::VectorXd pr = v.transpose() * re;
        Eigen::VectorXd pi = v.transpose() * im;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double c = std::cos(lambda(k) * dt), s = std::sin(lambda(k) * dt);
            const double r = pr(k), i = pi(k);
            pr(k) = c * r + s * i;
            pi(k) = c * i - s * r;
        }
        re = v * pr;
        im = v * pi;
    }

    std::vector<Amplitude> amps(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
        amps[static_cast<std::size_t>(k)] = Amplitude(re(k), im(k));
    }
    return StateVector::from_amplitudes(std::move(amps));
}

}  // namespace qabias

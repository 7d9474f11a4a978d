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

#include "qabias/annealing.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "qabias/errors.hpp"

namespace qabias {

Schedule::Schedule(double b0, double tau, double a, double dt) : b0_(b0), tau_(tau), a_(a) {
    if (!std::isfinite(b0) || b0 < 0.0) {
        throw InputError("schedule: B0 must be finite and >= 0");
    }
    if (!std::isfinite(tau) || tau <= 0.0) {
        throw InputError("schedule: tau must be finite and > 0");
    }
    if (!std::isfinite(a)) {
        throw InputError("schedule: A must be finite");
    }
    if (!std::isfinite(dt) || dt < 0.0) {
        throw InputError("schedule: dt must be finite and > 0");
    }
    requested_dt_ = dt > 0.0 ? dt : kDefaultDtInTau * tau;
    const double ratio = total_time() / requested_dt_;
    if (ratio > 1e9) {
        throw InputError("schedule: dt too small (more than 1e9 steps)");
    }
    // Tolerate ratios that miss an integer by rounding only.
    steps_ = static_cast<std::int64_t>(std::ceil(ratio * (1.0 - 1e-12)));
    if (steps_ < 1) {
        steps_ = 1;
    }
    dt_ = total_time() / static_cast<double>(steps_);
}

double Schedule::b_at(double t) const { return b0_ * std::exp(-t / tau_); }

SpinConfig config_from_magnetizations(const std::vector<double> &mz) {
    std::vector<int> s(mz.size());
    for (std::size_t m = 0; m < mz.size(); ++m) {
        s[m] = (std::abs(mz[m]) <= kSignTieTolerance || mz[m] > 0.0) ? 1 : -1;
    }
    return SpinConfig(std::move(s));
}

namespace {

void multiply_phase(std::span<Amplitude> amps, const std::vector<Amplitude> &phase) {
    double *__restrict x = reinterpret_cast<double *>(amps.data());
    const double *__restrict p = reinterpret_cast<const double *>(phase.data());
    const std::size_t dim = amps.size();
    for (std::size_t k = 0; k < dim; ++k) {
        const double re = x[2 * k], im = x[2 * k + 1];
        const double pr = p[2 * k], pi = p[2 * k + 1];
        x[2 * k] = re * pr - im * pi;
        x[2 * k + 1] = re * pi + im * pr;
    }
}

// Single-spin unitary Z(phi) X(theta) Z(phi) on spin m, where
// Z(phi) = exp(-i phi sigma^z) and X(theta) = exp(-i theta sigma^x).
// On the (bit 0, bit 1) pair:
//   [[c e^{2i phi}, -i s], [-i s, c e^{-2i phi}]]
void apply_spin_unitary(std::span<Amplitude> amps, int m, double s, double ur, double ui) {
    double *__restrict x = reinterpret_cast<double *>(amps.data());
    const std::size_t dim = amps.size();
    const std::size_t stride = std::size_t{1} << m;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        double *__restrict lo = x + 2 * base;
        double *__restrict hi = x + 2 * (base + stride);
        for (std::size_t k = 0; k < stride; ++k) {
            const double ar = lo[2 * k], ai = lo[2 * k + 1];
            const double br = hi[2 * k], bi = hi[2 * k + 1];
            lo[2 * k] = ur * ar - ui * ai + s * bi;
            lo[2 * k + 1] = ur * ai + ui * ar - s * br;
            hi[2 * k] = s * ai + ur * br + ui * bi;
            hi[2 * k + 1] = -s * ar + ur * bi - ui * br;
        }
    }
}

}  // namespace

Annealer::Annealer(const Instance &inst, const Schedule &sched)
    : inst_(inst), sched_(sched), table_(build_diagonal(inst)) {
    const double dt = sched_.step();
    const double a = sched_.a();
    full_phase_.resize(table_.values.size());
    half_phase_.resize(table_.values.size());
    for (std::size_t k = 0; k < table_.values.size(); ++k) {
        const double angle = -dt * a * table_.values[k];
        full_phase_[k] = Amplitude(std::cos(angle), std::sin(angle));
        half_phase_[k] = Amplitude(std::cos(0.5 * angle), std::sin(0.5 * angle));
    }
}

// Strang step j with midpoint coefficients (A, B_j):
//   D(dt/2) X(B_j dt) D(dt/2),  D = exp(-i dt/2 [A H_p + B_j sum h_m sigma^z_m])
// A is constant, so the A-part of adjacent half steps merges into one full
// phase, and the longitudinal part factorizes per spin and folds into each
// spin's transverse rotation. The result equals the literal step sequence up
// to rounding.
StateVector Annealer::evolve_uncached(const BiasField &bias) const {
    const int n = inst_.n;
    if (bias.size() != n) {
        throw InputError("evolve: bias length " + std::to_string(bias.size()) + " does not match n=" +
                         std::to_string(n));
    }
    StateVector state = initial_state(n, bias);
    auto amps = state.amplitudes();
    const double dt = sched_.step();
    const std::int64_t steps = sched_.steps();

    multiply_phase(amps, half_phase_);
    for (std::int64_t j = 0; j < steps; ++j) {
        const double b = sched_.b_at((static_cast<double>(j) + 0.5) * dt);
        const double theta = b * dt;
        const double c = std::cos(theta), s = std::sin(theta);
        for (int m = 0; m < n; ++m) {
            const double two_phi = b * bias[m] * dt;
            apply_spin_unitary(amps, m, s, c * std::cos(two_phi), c * std::sin(two_phi));
        }
        multiply_phase(amps, j + 1 < steps ? full_phase_ : half_phase_);
    }
    return state;
}

StateVector Annealer::evolve(const BiasField &bias) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(bias.values());
        if (it != cache_.end()) {
            return *it->second;
        }
    }
    auto state = std::make_shared<const StateVector>(evolve_uncached(bias));
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() < kCacheLimit) {
        cache_.emplace(bias.values(), state);
    }
    return *state;
}

std::size_t Annealer::cached_states() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.size();
}

RunRecord Annealer::run(const BiasField &bias, bool measure, std::uint64_t seed) const {
    const auto start = std::chrono::steady_clock::now();
    const StateVector state = evolve(bias);
    RunRecord rec;
    rec.success_prob = overlap_probability(state, inst_.solution);
    rec.magnetizations = magnetizations(state);
    rec.final_config = config_from_magnetizations(rec.magnetizations);
    rec.final_cost = cost_of_config(inst_, rec.final_config);
    rec.hamming_to_solution = hamming(rec.final_config, inst_.solution);
    rec.bias_used = bias;
    if (measure) {
        rec.sample_seed = seed;
        rec.sampled_config = sample_config(state, seed);
        rec.sampled_cost = cost_of_config(inst_, *rec.sampled_config);
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

StateVector evolve(const Instance &inst, const BiasField &bias, const Schedule &sched) {
    return Annealer(inst, sched).evolve(bias);
}

RunRecord run_once(const Instance &inst, const BiasField &bias, const Schedule &sched, bool measure,
                   std::uint64_t seed) {
    return Annealer(inst, sched).run(bias, measure, seed);
}

}  // namespace qabias

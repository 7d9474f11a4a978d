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

#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "qabias/errors.hpp"
#include "qabias/rng.hpp"

namespace qabias {

namespace {

void check_simulator_size(int n) {
    if (n < 0 || n > kMaxSimulatorSpins) {
        throw CapabilityError("state-vector simulation supports 0 <= n <= " + std::to_string(kMaxSimulatorSpins) +
                              ", got n=" + std::to_string(n));
    }
}

// Field contribution sum_m h_m s_m(k) for every k, built by doubling.
std::vector<double> longitudinal_sums(const BiasField &bias) {
    const int n = bias.size();
    std::vector<double> z(std::size_t{1} << n);
    double base = 0.0;
    for (int m = 0; m < n; ++m) {
        base -= bias[m];
    }
    z[0] = base;
    for (int m = 0; m < n; ++m) {
        const std::size_t half = std::size_t{1} << m;
        const double step = 2.0 * bias[m];
        for (std::size_t k = 0; k < half; ++k) {
            z[half + k] = z[k] + step;
        }
    }
    return z;
}

}  // namespace

StateVector StateVector::basis(int n, std::uint64_t index) {
    check_simulator_size(n);
    StateVector s;
    s.n_ = n;
    s.amps_.assign(std::size_t{1} << n, Amplitude{});
    s.amps_.at(index) = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps) {
    if (amps.empty() || !std::has_single_bit(amps.size())) {
        throw InputError("amplitude count " + std::to_string(amps.size()) + " is not a power of two");
    }
    StateVector s;
    s.n_ = std::countr_zero(amps.size());
    check_simulator_size(s.n_);
    s.amps_ = std::move(amps);
    return s;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

double fidelity(const StateVector &a, const StateVector &b) {
    if (a.dimension() != b.dimension()) {
        throw InputError("fidelity: dimension mismatch");
    }
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < a.dimension(); ++k) {
        // conj(a) * b
        re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
        im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
    }
    return re * re + im * im;
}

BiasField::BiasField(std::vector<double> h, double cap) : h_(std::move(h)) {
    for (std::size_t m = 0; m < h_.size(); ++m) {
        if (!std::isfinite(h_[m])) {
            throw InputError("bias field entry " + std::to_string(m) + " is not finite");
        }
        if (std::abs(h_[m]) > cap) {
            throw InputError("bias field entry " + std::to_string(m) + " = " + std::to_string(h_[m]) +
                             " exceeds the cap " + std::to_string(cap));
        }
    }
}

BiasField BiasField::toward(const SpinConfig &guess) {
    std::vector<double> h(static_cast<std::size_t>(guess.size()));
    for (int m = 0; m < guess.size(); ++m) {
        h[static_cast<std::size_t>(m)] = -static_cast<double>(guess[m]);
    }
    return BiasField(std::move(h));
}

bool BiasField::is_zero() const {
    for (double v : h_) {
        if (v != 0.0) {
            return false;
        }
    }
    return true;
}

DiagonalTable build_diagonal(const Instance &inst) {
    check_simulator_size(inst.n);
    DiagonalTable table;
    table.n = inst.n;
    const std::size_t dim = std::size_t{1} << inst.n;
    table.values.assign(dim, 0.0);
    static constexpr double kClauseCost[4] = {16.0, 4.0, 0.0, 4.0};
    for (const Clause &c : inst.clauses) {
        const std::uint64_t mask = c.mask();
        for (std::size_t k = 0; k < dim; ++k) {
            table.values[k] += kClauseCost[std::popcount(k & mask)];
        }
    }
    return table;
}

StateVector initial_state(int n, const BiasField &bias) {
    check_simulator_size(n);
    if (bias.size() != n) {
        throw InputError("initial_state: bias length " + std::to_string(bias.size()) + " does not match n=" +
                         std::to_string(n));
    }
    std::vector<Amplitude> amps(std::size_t{1} << n);
    amps[0] = 1.0;
    for (int m = 0; m < n; ++m) {
        const double h = bias[m];
        const double lambda = -std::sqrt(1.0 + h * h);
        const double lower = lambda - h;
        const double norm = std::sqrt(1.0 + lower * lower);
        const double up = 1.0 / norm;  // s = +1, bit 1
        const double down = lower / norm;
        const std::size_t half = std::size_t{1} << m;
        for (std::size_t k = 0; k < half; ++k) {
            amps[half + k] = amps[k] * up;
            amps[k] *= down;
        }
    }
    return StateVector::from_amplitudes(std::move(amps));
}

void apply_diagonal_phase(StateVector &state, const DiagonalTable &table, const BiasField &bias, double a,
                          double b, double dt) {
    if (table.values.size() != state.dimension() || bias.size() != state.n()) {
        throw InputError("apply_diagonal_phase: dimension mismatch");
    }
    const std::vector<double> z = longitudinal_sums(bias);
    auto amps = state.amplitudes();
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const double angle = -dt * (a * table.values[k] + b * z[k]);
        const double c = std::cos(angle), s = std::sin(angle);
        const double re = amps[k].real(), im = amps[k].imag();
        amps[k] = Amplitude(re * c - im * s, re * s + im * c);
    }
}

void apply_transverse_rotation(StateVector &state, double b, double dt) {
    const double c = std::cos(b * dt), s = std::sin(b * dt);
    auto amps = state.amplitudes();
    const std::size_t dim = amps.size();
    for (int m = 0; m < state.n(); ++m) {
        const std::size_t stride = std::size_t{1} << m;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t k = base; k < base + stride; ++k) {
                const Amplitude lo = amps[k], hi = amps[k + stride];
                // (a, b) -> (c a - i s b, -i s a + c b)
                amps[k] = Amplitude(c * lo.real() + s * hi.imag(), c * lo.imag() - s * hi.real());
                amps[k + stride] = Amplitude(s * lo.imag() + c * hi.real(), -s * lo.real() + c * hi.imag());
            }
        }
    }
}

double magnetization(const StateVector &state, int m) {
    if (m < 0 || m >= state.n()) {
        throw InputError("magnetization: spin index " + std::to_string(m) + " out of range for n=" +
                         std::to_string(state.n()));
    }
    const std::size_t bit = std::size_t{1} << m;
    double acc = 0.0;
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        const double p = std::norm(state[k]);
        acc += (k & bit) ? p : -p;
    }
    return acc;
}

std::vector<double> magnetizations(const StateVector &state) {
    std::vector<double> out(static_cast<std::size_t>(state.n()));
    for (int m = 0; m < state.n(); ++m) {
        out[static_cast<std::size_t>(m)] = magnetization(state, m);
    }
    return out;
}

double overlap_probability(const StateVector &state, const SpinConfig &cfg) {
    if (cfg.size() != state.n()) {
        throw InputError("overlap_probability: config length " + std::to_string(cfg.size()) +
                         " does not match n=" + std::to_string(state.n()));
    }
    return std::norm(state[cfg.index()]);
}

SpinConfig sample_config(const StateVector &state, std::uint64_t seed) {
    Rng rng(seed);
    const double target = rng.uniform() * state.norm_squared();
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        const double p = std::norm(state[k]);
        if (p > 0.0) {
            last_nonzero = k;
        }
        acc += p;
        if (target < acc) {
            return SpinConfig::from_index(state.n(), k);
        }
    }
    // Only reachable through rounding in the running sum.
    return SpinConfig::from_index(state.n(), last_nonzero);
}

void write_state_text(std::ostream &os, const StateVector &state) {
    os << state.n() << '\n' << std::setprecision(17);
    for (const Amplitude &a : state.amplitudes()) {
        os << a.real() << ' ' << a.imag() << '\n';
    }
}

StateVector read_state_text(std::istream &is) {
    int n = -1;
    if (!(is >> n)) {
        throw InputError("state dump: missing spin count");
    }
    check_simulator_size(n);
    std::vector<Amplitude> amps(std::size_t{1} << n);
    for (std::size_t k = 0; k < amps.size(); ++k) {
        double re = 0.0;
        double im = 0.0;
        if (!(is >> re >> im)) {
            throw InputError("state dump: expected " + std::to_string(amps.size()) + " amplitudes, read " +
                             std::to_string(k));
        }
        amps[k] = {re, im};
    }
    return StateVector::from_amplitudes(std::move(amps));
}

}  // namespace qabias

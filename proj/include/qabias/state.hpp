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

#ifndef QABIAS_STATE_HPP
#define QABIAS_STATE_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qabias/exact_cover.hpp"

namespace qabias {

using Amplitude = std::complex<double>;

/// Largest spin count the state-vector simulator accepts.
inline constexpr int kMaxSimulatorSpins = 20;

/// Dense 2^n amplitude vector. Basis index k corresponds to
/// SpinConfig::from_index(n, k).
class StateVector {
   public:
    StateVector() = default;
    /// The basis state |index>.
    static StateVector basis(int n, std::uint64_t index);
    /// Takes ownership of amplitudes; size must be a power of two. Not renormalized.
    static StateVector from_amplitudes(std::vector<Amplitude> amps);

    int n() const { return n_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }
    const Amplitude &operator[](std::size_t k) const { return amps_[k]; }

    double norm_squared() const;

   private:
    int n_ = 0;
    std::vector<Amplitude> amps_;
};

/// |<a|b>|^2
double fidelity(const StateVector &a, const StateVector &b);

/// Per-spin longitudinal field h_m, the coefficient of sigma^z_m inside the
/// driver term.
class BiasField {
   public:
    static constexpr double kDefaultCap = 10.0;

    BiasField() = default;
    /// Throws InputError for non-finite entries or |h_m| > cap.
    explicit BiasField(std::vector<double> h, double cap = kDefaultCap);

    static BiasField zeros(int n) { return BiasField(std::vector<double>(static_cast<std::size_t>(n), 0.0)); }
    /// h_m = -s_m: energetically favours `guess`.
    static BiasField toward(const SpinConfig &guess);

    int size() const { return static_cast<int>(h_.size()); }
    double operator[](int m) const { return h_[static_cast<std::size_t>(m)]; }
    const std::vector<double> &values() const { return h_; }
    bool is_zero() const;

    friend bool operator==(const BiasField &, const BiasField &) = default;

   private:
    std::vector<double> h_;
};

/// Problem-Hamiltonian diagonal: values[k] = cost of basis configuration k.
struct DiagonalTable {
    int n = 0;
    std::vector<double> values;
};

DiagonalTable build_diagonal(const Instance &inst);

/// Product of single-spin ground states of (sigma^x + h_m sigma^z).
/// Per spin the unnormalized components are (1, lambda - h) on (s=+1, s=-1)
/// with lambda = -sqrt(1 + h^2); the s=+1 component is real and positive.
StateVector initial_state(int n, const BiasField &bias);

/// amp_k *= exp(-i dt [A table_k + B sum_m h_m s_m(k)])
void apply_diagonal_phase(StateVector &state, const DiagonalTable &table, const BiasField &bias, double a,
                          double b, double dt);

/// exp(-i dt B sigma^x_m) on every spin.
void apply_transverse_rotation(StateVector &state, double b, double dt);

/// <sigma^z_m>. Throws InputError if m is out of range.
double magnetization(const StateVector &state, int m);
std::vector<double> magnetizations(const StateVector &state);

/// |<cfg|state>|^2
double overlap_probability(const StateVector &state, const SpinConfig &cfg);

/// One joint sigma^z measurement of all spins, drawn with probability
/// |amp_k|^2. Deterministic in (state, seed).
SpinConfig sample_config(const StateVector &state, std::uint64_t seed);

/// Debug dump: a line "n", then 2^n lines "re im" in basis-index order,
/// printed with 17 significant digits.
void write_state_text(std::ostream &os, const StateVector &state);
/// Reads write_state_text output. Throws InputError on malformed input.
StateVector read_state_text(std::istream &is);

}  // namespace qabias

#endif

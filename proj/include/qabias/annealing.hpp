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

#ifndef QABIAS_ANNEALING_HPP
#define QABIAS_ANNEALING_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qabias/exact_cover.hpp"
#include "qabias/state.hpp"

namespace qabias {

/// Annealing schedule H(t) = A H_p + B(t) H_q with B(t) = B0 exp(-t / tau),
/// run for T = 10 tau.
///
/// The requested dt is shrunk to the largest value that divides T into an
/// integer number of steps; step() and steps() report the adjusted values.
class Schedule {
   public:
    static constexpr double kDurationInTau = 10.0;
    static constexpr double kDefaultDtInTau = 5e-4;

    /// Throws InputError unless b0 >= 0, tau > 0, a finite, dt > 0.
    /// dt <= 0 in the argument list selects the default 5e-4 tau.
    explicit Schedule(double b0 = 50.0, double tau = 1.0, double a = 1.0, double dt = 0.0);

    double b0() const { return b0_; }
    double tau() const { return tau_; }
    double a() const { return a_; }
    double total_time() const { return kDurationInTau * tau_; }
    std::int64_t steps() const { return steps_; }
    double step() const { return dt_; }
    /// The dt originally asked for (before adjustment).
    double requested_step() const { return requested_dt_; }

    double b_at(double t) const;
    double a_at(double) const { return a_; }

    /// Same schedule with a different integrator step.
    Schedule with_step(double dt) const { return Schedule(b0_, tau_, a_, dt); }

   private:
    double b0_, tau_, a_, requested_dt_, dt_;
    std::int64_t steps_;
};

/// Outcome of one annealing run.
struct RunRecord {
    int alpha = 1;  // 1-based position within a protocol
    double success_prob = 0.0;
    SpinConfig final_config;  // signs of <sigma^z_m>, ties -> +1
    std::int64_t final_cost = 0;
    int hamming_to_solution = 0;
    std::vector<double> magnetizations;
    std::optional<SpinConfig> sampled_config;
    std::optional<std::int64_t> sampled_cost;
    std::uint64_t sample_seed = 0;
    BiasField bias_used;
    double wall_seconds = 0.0;
};

/// |<sigma^z>| at or below this maps to s = +1.
inline constexpr double kSignTieTolerance = 1e-9;
SpinConfig config_from_magnetizations(const std::vector<double> &mz);

/// Per-instance evolution context. Holds the problem diagonal and the
/// precomputed A-phase for one (instance, schedule) pair, and memoizes final
/// states by bias field so that protocols sharing a run (every protocol
/// starts with the unbiased one) evolve it once.
///
/// Thread-safe; different Annealers are fully independent.
class Annealer {
   public:
    Annealer(const Instance &inst, const Schedule &sched);

    const Instance &instance() const { return inst_; }
    const Schedule &schedule() const { return sched_; }
    const DiagonalTable &diagonal() const { return table_; }

    /// Final state at t = T from initial_state(n, bias).
    StateVector evolve(const BiasField &bias) const;

    /// evolve() plus readout. When `measure` is set, draws one projective
    /// sample with `seed`.
    RunRecord run(const BiasField &bias, bool measure, std::uint64_t seed) const;

    std::size_t cached_states() const;

   private:
    StateVector evolve_uncached(const BiasField &bias) const;

    Instance inst_;
    Schedule sched_;
    DiagonalTable table_;
    std::vector<Amplitude> full_phase_;  // exp(-i dt A table_k)
    std::vector<Amplitude> half_phase_;  // exp(-i dt/2 A table_k)

    static constexpr std::size_t kCacheLimit = 16;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::vector<double>, std::shared_ptr<const StateVector>> cache_;
};

/// Strang-split evolution of initial_state(n, bias) under the schedule.
StateVector evolve(const Instance &inst, const BiasField &bias, const Schedule &sched);

RunRecord run_once(const Instance &inst, const BiasField &bias, const Schedule &sched, bool measure,
                   std::uint64_t seed);

/// Reference propagator: dense 2^n x 2^n Hamiltonian at each step midpoint,
/// exponentiated by diagonalization. Throws CapabilityError for n > 8.
inline constexpr int kMaxOracleSpins = 8;
StateVector dense_propagator_oracle(const Instance &inst, const BiasField &bias, const Schedule &sched,
                                    double dt_ref);

}  // namespace qabias

#endif

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

#ifndef QABIAS_PROTOCOLS_HPP
#define QABIAS_PROTOCOLS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qabias/annealing.hpp"

namespace qabias {

enum class Protocol { standard, biased, iterative, antibias };
std::string_view to_string(Protocol p);
/// Throws InputError for unknown names.
Protocol protocol_from_string(std::string_view name);

enum class Termination { fixed_point, solution_found, step_cap };
std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view name);

/// What ends an antibias loop: a zero-cost projective sample (default) or a
/// zero-cost expectation-value configuration.
enum class AntibiasStop { sample, expectation };

struct ProtocolResult {
    std::vector<RunRecord> records;  // one per run, alpha = 1, 2, ...
    Termination terminated_by = Termination::fixed_point;
    bool bias_capped = false;  // antibias field hit the BiasField cap

    int steps_used() const { return static_cast<int>(records.size()); }
    const RunRecord &final_record() const { return records.back(); }
    std::vector<double> success_probs() const;
};

inline constexpr int kDefaultMaxIters = 20;
inline constexpr int kDefaultMaxSteps = 100;
inline constexpr double kDefaultAntibiasStrength = 0.1;

/// Seed for run alpha of a protocol on one instance:
///   derive_seed({master_seed, instance_seed, alpha})
/// Depends only on those three words, never on scheduling order.
std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t instance_seed, int alpha);

/// One unbiased run.
ProtocolResult run_standard(const Annealer &annealer, std::uint64_t seed);
/// One run with h_m = -guess_m.
ProtocolResult run_biased(const Annealer &annealer, const SpinConfig &guess, std::uint64_t seed);
/// Unbiased first run, then h_m = -s_m^final of the previous run, until two
/// consecutive runs give the same final configuration or max_iters runs.
ProtocolResult run_iterative(const Annealer &annealer, std::uint64_t seed, int max_iters = kDefaultMaxIters);
/// Accumulative antibias h_m = h * sum over previous samples of s_m, one
/// projective sample per run, until a zero-cost outcome or max_steps runs.
ProtocolResult run_antibias(const Annealer &annealer, std::uint64_t seed, double h = kDefaultAntibiasStrength,
                            int max_steps = kDefaultMaxSteps, AntibiasStop stop = AntibiasStop::sample);

// Convenience forms that build a one-off Annealer.
ProtocolResult run_standard(const Instance &inst, const Schedule &sched, std::uint64_t seed);
ProtocolResult run_biased(const Instance &inst, const SpinConfig &guess, const Schedule &sched,
                          std::uint64_t seed);
ProtocolResult run_iterative(const Instance &inst, const Schedule &sched, std::uint64_t seed,
                             int max_iters = kDefaultMaxIters);
ProtocolResult run_antibias(const Instance &inst, const Schedule &sched, std::uint64_t seed,
                            double h = kDefaultAntibiasStrength, int max_steps = kDefaultMaxSteps,
                            AntibiasStop stop = AntibiasStop::sample);

}  // namespace qabias

#endif

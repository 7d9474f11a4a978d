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

#ifndef QABIAS_METRICS_HPP
#define QABIAS_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qabias/protocols.hpp"

namespace qabias {

/// The per-run numbers aggregation needs. Everything here is also a
/// runs.csv column, so statistics can be recomputed from the CSV alone.
struct RunSummary {
    double success_prob = 0.0;
    int hamming = 0;
    std::int64_t cost = 0;
};

struct ResultSummary {
    std::uint64_t instance_seed = 0;
    std::vector<RunSummary> runs;
    Termination terminated_by = Termination::fixed_point;

    int steps_used() const { return static_cast<int>(runs.size()); }
    const RunSummary &final_run() const { return runs.back(); }
};

ResultSummary summarize(const ProtocolResult &result, std::uint64_t instance_seed);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::size_t count = 0;

    double standard_error() const;
};
MeanStd mean_std(std::span<const double> xs);

/// Hardest subset: the instances with the lowest standard success
/// probability, ties broken by ascending instance seed.
struct HardestSubset {
    double fraction = 0.0;
    int count = 0;
    double p_standard = 0.0;  // p(q%)
    double p_bar = 0.0;       // pbar(q%)
    double p_final = 0.0;     // p^f(q%)
};

struct EnsembleStats {
    int instances = 0;

    MeanStd p_standard;  // p_i of the unbiased run
    MeanStd p_final;     // p_i of each result's last run (p^f, p^iter)
    double p_bar = 0.0;  // < <p_i^alpha>_alpha >_i
    double gamma = 0.0;  // p_final.mean / p_standard.mean

    double tau_standard = 0.0;  // <1/p_i>; +inf when some p_i == 0
    bool tau_standard_infinite = false;
    MeanStd steps;  // tau^ab for antibias, iterations for iterative

    MeanStd hamming_standard;
    MeanStd hamming_final;
    MeanStd cost_standard;
    MeanStd cost_final;
    int exact_matches_standard = 0;
    int exact_matches_final = 0;
    int step_cap_count = 0;
    /// Instances whose final cost exceeds their unbiased cost.
    int cost_increases = 0;

    HardestSubset hardest;
};

inline constexpr double kDefaultHardestFraction = 0.05;

/// Ensemble figures of merit for `results` against the unbiased runs of
/// the same instances. Entries are matched by position; throws InputError
/// when the two lists differ in length or instance seeds.
EnsembleStats metrics(std::span<const ResultSummary> results, std::span<const ResultSummary> standard,
                      double hardest_fraction = kDefaultHardestFraction);

/// Indices into `standard` of the hardest max(1, round(q * count))
/// instances, hardest first.
std::vector<std::size_t> hardest_indices(std::span<const ResultSummary> standard, double fraction);

}  // namespace qabias

#endif

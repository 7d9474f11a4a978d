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

#ifndef QABIAS_SWEEP_HPP
#define QABIAS_SWEEP_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qabias/metrics.hpp"
#include "qabias/protocols.hpp"

namespace qabias {

/// Batch description. JSON form (all keys but "sizes" optional):
///
///   {"sizes": [10, 11],
///    "m_rule": {"ratio": 0.7} | {"per_size": {"10": 7, "11": 8}},
///    "instances_per_size": 100,
///    "protocols": ["biased", "iterative", "antibias"],
///    "d": [0, 1, 2, 4], "h": 0.1, "max_iters": 20, "max_steps": 100,
///    "hardest_fraction": 0.05,
///    "schedule": {"b0": 50, "tau": 1, "a": 1, "dt": 0.0005},
///    "master_seed": "1", "retry_budget": 1000000, "jobs": 0, "out": "sweep-out"}
///
/// The unbiased (standard) run of every instance is always part of a sweep.
struct SweepSpec {
    std::vector<int> sizes;
    double m_ratio = kDefaultClauseRatio;
    std::map<int, int> m_per_size;  // overrides m_ratio when non-empty
    int instances_per_size = 100;
    std::vector<Protocol> protocols{Protocol::standard};
    std::vector<int> d_values{0, 1, 2, 4};
    double h = kDefaultAntibiasStrength;
    int max_iters = kDefaultMaxIters;
    int max_steps = kDefaultMaxSteps;
    double hardest_fraction = kDefaultHardestFraction;
    double b0 = 50.0, tau = 1.0, a = 1.0, dt = 0.0;  // dt 0 -> schedule default
    std::uint64_t master_seed = 1;
    std::uint64_t retry_budget = 1000000;
    int jobs = 0;  // 0 -> hardware concurrency
    std::filesystem::path out = "sweep-out";

    int clauses_for(int n) const;
    Schedule schedule() const { return Schedule(b0, tau, a, dt); }
    bool has(Protocol p) const;

    /// Throws InputError describing the first invalid field.
    void validate() const;
    std::string to_json() const;
    static SweepSpec from_json(const std::string &text);
    static SweepSpec load(const std::filesystem::path &path);
};

/// One runs.csv row. Column order is fixed:
///   instance_id,n,m,instance_seed,protocol,d,alpha,success_prob,hamming,cost,
///   sample_hamming,sample_cost,steps_used,terminated_by,run_seed
/// d is -1 (written "-") for cells other than biased.
struct RunRow {
    std::string instance_id;
    int n = 0;
    int m = 0;
    std::uint64_t instance_seed = 0;
    Protocol protocol = Protocol::standard;
    int d = -1;
    int alpha = 1;
    double success_prob = 0.0;
    int hamming = 0;
    std::int64_t cost = 0;
    int sample_hamming = -1;
    std::int64_t sample_cost = -1;
    int steps_used = 1;
    Termination terminated_by = Termination::fixed_point;
    std::uint64_t run_seed = 0;
};

extern const char *const kRunsCsvHeader;
std::string format_row(const RunRow &row);
/// Throws InputError naming the line on malformed input.
RunRow parse_row(const std::string &line, std::size_t line_number);
std::vector<RunRow> read_runs_csv(const std::filesystem::path &path);

/// A (protocol, d) cell run on one instance.
struct CellResult {
    Protocol protocol = Protocol::standard;
    int d = -1;
    ProtocolResult result;
};

/// Runs every cell of the spec on one instance, sharing one Annealer so the
/// unbiased evolution is computed once. Standard comes first.
std::vector<CellResult> run_instance_cells(const Instance &inst, const SweepSpec &spec);

std::vector<RunRow> rows_for_instance(const std::string &instance_id, const Instance &inst,
                                      const std::vector<CellResult> &cells);

/// Seed of the biased-run guess for bias distance d on one instance.
std::uint64_t guess_seed(std::uint64_t master_seed, std::uint64_t instance_seed, int d);

struct SizeEnsemble {
    int n = 0;
    int m = 0;
    std::vector<Instance> instances;
    std::uint64_t attempts = 0;
    double acceptance_rate() const;
};

/// Deterministic certified ensemble for one size. Throws CapabilityError if
/// the retry budget runs out.
SizeEnsemble generate_ensemble(const SweepSpec &spec, int n);

std::string instance_id(int n, std::size_t seq);

struct CellStats {
    int n = 0;
    int m = 0;
    Protocol protocol = Protocol::standard;
    int d = -1;
    EnsembleStats stats;
};

/// Pure aggregation of runs.csv rows into per-(size, cell) statistics.
std::vector<CellStats> aggregate(const std::vector<RunRow> &rows, double hardest_fraction);

/// Groups rows into per-instance summaries of one cell, in file order.
std::vector<ResultSummary> cell_summaries(const std::vector<RunRow> &rows, int n, Protocol protocol, int d);

struct SweepOptions {
    /// Stop after this many newly completed instances (resume testing).
    std::optional<std::size_t> stop_after;
    std::function<void(const std::string &)> progress;
};

struct SweepOutcome {
    std::size_t instances_total = 0;
    std::size_t instances_skipped = 0;  // already present in runs.csv
    std::size_t instances_run = 0;
    std::vector<std::string> failures;
    bool complete = false;
    std::vector<CellStats> stats;
};

/// Runs the grid, appending to <out>/runs.csv in instance order, then writes
/// stats.json and the fig*.dat / table1.dat files. Resumes from an existing
/// runs.csv written by the same spec.
SweepOutcome run_sweep(const SweepSpec &spec, const SweepOptions &options = {});

std::string stats_to_json(const std::vector<CellStats> &stats, const SweepSpec &spec,
                          const std::vector<SizeEnsemble> &ensembles, const std::vector<std::string> &failures);

}  // namespace qabias

#endif

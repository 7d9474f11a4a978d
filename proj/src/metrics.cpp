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

#include "qabias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qabias/errors.hpp"

namespace qabias {

ResultSummary summarize(const ProtocolResult &result, std::uint64_t instance_seed) {
    ResultSummary s;
    s.instance_seed = instance_seed;
    s.terminated_by = result.terminated_by;
    s.runs.reserve(result.records.size());
    for (const RunRecord &r : result.records) {
        s.runs.push_back(RunSummary{r.success_prob, r.hamming_to_solution, r.final_cost});
    }
    return s;
}

double MeanStd::standard_error() const { return count > 0 ? std / std::sqrt(static_cast<double>(count)) : 0.0; }

MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    out.count = xs.size();
    if (xs.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) {
        sq += (x - out.mean) * (x - out.mean);
    }
    out.std = std::sqrt(sq / static_cast<double>(xs.size()));
    return out;
}

std::vector<std::size_t> hardest_indices(std::span<const ResultSummary> standard, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw InputError("hardest fraction must lie in (0, 1]");
    }
    std::vector<std::size_t> order(standard.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double pa = standard[a].final_run().success_prob;
        const double pb = standard[b].final_run().success_prob;
        if (pa != pb) {
            return pa < pb;
        }
        return standard[a].instance_seed < standard[b].instance_seed;
    });
    if (order.empty()) {
        return order;
    }
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(standard.size()))));
    order.resize(std::min(count, order.size()));
    return order;
}

namespace {

double mean_over_runs(const ResultSummary &r) {
    double s = 0.0;
    for (const auto &run : r.runs) {
        s += run.success_prob;
    }
    return s / static_cast<double>(r.runs.size());
}

}  // namespace

EnsembleStats metrics(std::span<const ResultSummary> results, std::span<const ResultSummary> standard,
                      double hardest_fraction) {
    if (results.size() != standard.size()) {
        throw InputError("metrics: " + std::to_string(results.size()) + " results but " +
                         std::to_string(standard.size()) + " standard runs");
    }
    const std::size_t count = results.size();
    std::vector<double> p_st, p_f, p_avg, steps, ham_st, ham_f, cost_st, cost_f;
    EnsembleStats out;
    out.instances = static_cast<int>(count);
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const ResultSummary &r = results[i];
        const ResultSummary &s = standard[i];
        if (r.instance_seed != s.instance_seed) {
            throw InputError("metrics: instance " + std::to_string(i) + " seeds differ between ensembles");
        }
        if (r.runs.empty() || s.runs.empty()) {
            throw InputError("metrics: instance " + std::to_string(i) + " has no runs");
        }
        const RunSummary &fin = r.final_run();
        const RunSummary &st = s.final_run();
        p_st.push_back(st.success_prob);
        p_f.push_back(fin.success_prob);
        p_avg.push_back(mean_over_runs(r));
        steps.push_back(static_cast<double>(r.steps_used()));
        ham_st.push_back(st.hamming);
        ham_f.push_back(fin.hamming);
        cost_st.push_back(static_cast<double>(st.cost));
        cost_f.push_back(static_cast<double>(fin.cost));
        out.exact_matches_standard += st.hamming == 0;
        out.exact_matches_final += fin.hamming == 0;
        out.step_cap_count += r.terminated_by == Termination::step_cap;
        out.cost_increases += fin.cost > st.cost;
        if (st.success_prob > 0.0) {
            inv_sum += 1.0 / st.success_prob;
        } else {
            out.tau_standard_infinite = true;
        }
    }
    out.p_standard = mean_std(p_st);
    out.p_final = mean_std(p_f);
    out.p_bar = mean_std(p_avg).mean;
    out.gamma = out.p_standard.mean > 0.0 ? out.p_final.mean / out.p_standard.mean
                                          : std::numeric_limits<double>::infinity();
    if (count > 0) {
        out.tau_standard = out.tau_standard_infinite ? std::numeric_limits<double>::infinity()
                                                     : inv_sum / static_cast<double>(count);
    }
    out.steps = mean_std(steps);
    out.hamming_standard = mean_std(ham_st);
    out.hamming_final = mean_std(ham_f);
    out.cost_standard = mean_std(cost_st);
    out.cost_final = mean_std(cost_f);

    out.hardest.fraction = hardest_fraction;
    const auto hard = hardest_indices(standard, hardest_fraction);
    out.hardest.count = static_cast<int>(hard.size());
    if (!hard.empty()) {
        double ps = 0.0, pb = 0.0, pf = 0.0;
        for (auto i : hard) {
            ps += p_st[i];
            pb += p_avg[i];
            pf += p_f[i];
        }
        const auto k = static_cast<double>(hard.size());
        out.hardest.p_standard = ps / k;
        out.hardest.p_bar = pb / k;
        out.hardest.p_final = pf / k;
    }
    return out;
}

}  // namespace qabias

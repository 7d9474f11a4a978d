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

#include "qabias/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "qabias/errors.hpp"
#include "qabias/rng.hpp"

namespace qabias {

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::standard:
            return "standard";
        case Protocol::biased:
            return "biased";
        case Protocol::iterative:
            return "iterative";
        case Protocol::antibias:
            return "antibias";
    }
    return "?";
}

Protocol protocol_from_string(std::string_view name) {
    for (auto p : {Protocol::standard, Protocol::biased, Protocol::iterative, Protocol::antibias}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw InputError("unknown protocol \"" + std::string(name) +
                     "\" (expected standard, biased, iterative, or antibias)");
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::fixed_point:
            return "fixed-point";
        case Termination::solution_found:
            return "solution-found";
        case Termination::step_cap:
            return "step-cap";
    }
    return "?";
}

Termination termination_from_string(std::string_view name) {
    for (auto t : {Termination::fixed_point, Termination::solution_found, Termination::step_cap}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    throw InputError("unknown termination \"" + std::string(name) + "\"");
}

std::vector<double> ProtocolResult::success_probs() const {
    std::vector<double> p;
    p.reserve(records.size());
    for (const auto &r : records) {
        p.push_back(r.success_prob);
    }
    return p;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t instance_seed, int alpha) {
    return derive_seed({master_seed, instance_seed, static_cast<std::uint64_t>(alpha)});
}

namespace {

RunRecord numbered_run(const Annealer &annealer, const BiasField &bias, std::uint64_t master, int alpha) {
    RunRecord rec = annealer.run(bias, true, run_seed(master, annealer.instance().seed, alpha));
    rec.alpha = alpha;
    return rec;
}

}  // namespace

ProtocolResult run_standard(const Annealer &annealer, std::uint64_t seed) {
    ProtocolResult out;
    out.records.push_back(numbered_run(annealer, BiasField::zeros(annealer.instance().n), seed, 1));
    out.terminated_by = Termination::fixed_point;
    return out;
}

ProtocolResult run_biased(const Annealer &annealer, const SpinConfig &guess, std::uint64_t seed) {
    if (guess.size() != annealer.instance().n) {
        throw InputError("run_biased: guess length " + std::to_string(guess.size()) + " does not match n=" +
                         std::to_string(annealer.instance().n));
    }
    ProtocolResult out;
    out.records.push_back(numbered_run(annealer, BiasField::toward(guess), seed, 1));
    out.terminated_by = Termination::fixed_point;
    return out;
}

ProtocolResult run_iterative(const Annealer &annealer, std::uint64_t seed, int max_iters) {
    if (max_iters < 2) {
        throw InputError("run_iterative: max_iters must be >= 2, got " + std::to_string(max_iters));
    }
    ProtocolResult out;
    out.records.push_back(numbered_run(annealer, BiasField::zeros(annealer.instance().n), seed, 1));
    out.terminated_by = Termination::step_cap;
    for (int alpha = 2; alpha <= max_iters; ++alpha) {
        const SpinConfig previous = out.records.back().final_config;
        out.records.push_back(numbered_run(annealer, BiasField::toward(previous), seed, alpha));
        if (out.records.back().final_config == previous) {
            out.terminated_by = Termination::fixed_point;
            break;
        }
    }
    return out;
}

ProtocolResult run_antibias(const Annealer &annealer, std::uint64_t seed, double h, int max_steps,
                            AntibiasStop stop) {
    if (!(h > 0.0 && h < 1.0)) {
        throw InputError("run_antibias: h must lie in (0, 1), got " + std::to_string(h));
    }
    if (max_steps < 1) {
        throw InputError("run_antibias: max_steps must be >= 1");
    }
    const int n = annealer.instance().n;
    // Integer spin sums keep the accumulated field exactly h * k.
    std::vector<int> accumulated(static_cast<std::size_t>(n), 0);
    ProtocolResult out;
    out.terminated_by = Termination::step_cap;
    for (int alpha = 1; alpha <= max_steps; ++alpha) {
        std::vector<double> field(static_cast<std::size_t>(n));
        for (std::size_t m = 0; m < field.size(); ++m) {
            double v = h * accumulated[m];
            if (std::abs(v) > BiasField::kDefaultCap) {
                v = std::copysign(BiasField::kDefaultCap, v);
                out.bias_capped = true;
            }
            field[m] = v;
        }
        out.records.push_back(numbered_run(annealer, BiasField(std::move(field)), seed, alpha));
        const RunRecord &rec = out.records.back();
        const bool solved =
            stop == AntibiasStop::sample ? rec.sampled_cost.value() == 0 : rec.final_cost == 0;
        if (solved) {
            out.terminated_by = Termination::solution_found;
            break;
        }
        for (int m = 0; m < n; ++m) {
            accumulated[static_cast<std::size_t>(m)] += (*rec.sampled_config)[m];
        }
    }
    return out;
}

ProtocolResult run_standard(const Instance &inst, const Schedule &sched, std::uint64_t seed) {
    return run_standard(Annealer(inst, sched), seed);
}

ProtocolResult run_biased(const Instance &inst, const SpinConfig &guess, const Schedule &sched,
                          std::uint64_t seed) {
    return run_biased(Annealer(inst, sched), guess, seed);
}

ProtocolResult run_iterative(const Instance &inst, const Schedule &sched, std::uint64_t seed, int max_iters) {
    return run_iterative(Annealer(inst, sched), seed, max_iters);
}

ProtocolResult run_antibias(const Instance &inst, const Schedule &sched, std::uint64_t seed, double h,
                            int max_steps, AntibiasStop stop) {
    return run_antibias(Annealer(inst, sched), seed, h, max_steps, stop);
}

}  // namespace qabias

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

#include "qabias/exact_cover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "qabias/errors.hpp"
#include "qabias/rng.hpp"

namespace qabias {

SpinConfig::SpinConfig(std::vector<int> spins) : spins_(std::move(spins)) {
    for (std::size_t m = 0; m < spins_.size(); ++m) {
        if (spins_[m] != 1 && spins_[m] != -1) {
            throw InputError("spin " + std::to_string(m) + " has value " + std::to_string(spins_[m]) +
                             ", expected +1 or -1");
        }
    }
}

SpinConfig SpinConfig::from_index(int n, std::uint64_t index) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        s[static_cast<std::size_t>(m)] = ((index >> m) & 1U) ? 1 : -1;
    }
    SpinConfig c;
    c.spins_ = std::move(s);
    return c;
}

SpinConfig SpinConfig::from_bits(std::string_view bits) {
    std::vector<int> s;
    s.reserve(bits.size());
    for (std::size_t m = 0; m < bits.size(); ++m) {
        if (bits[m] == '1') {
            s.push_back(1);
        } else if (bits[m] == '0') {
            s.push_back(-1);
        } else {
            throw InputError("bit string has character '" + std::string(1, bits[m]) + "' at position " +
                             std::to_string(m));
        }
    }
    SpinConfig c;
    c.spins_ = std::move(s);
    return c;
}

SpinConfig SpinConfig::all_up(int n) { return SpinConfig(std::vector<int>(static_cast<std::size_t>(n), 1)); }

std::uint64_t SpinConfig::index() const {
    std::uint64_t k = 0;
    for (std::size_t m = 0; m < spins_.size(); ++m) {
        if (spins_[m] > 0) {
            k |= std::uint64_t{1} << m;
        }
    }
    return k;
}

std::string SpinConfig::bits() const {
    std::string out(spins_.size(), '0');
    for (std::size_t m = 0; m < spins_.size(); ++m) {
        if (spins_[m] > 0) {
            out[m] = '1';
        }
    }
    return out;
}

SpinConfig SpinConfig::negated() const {
    SpinConfig c = *this;
    for (auto &s : c.spins_) {
        s = -s;
    }
    return c;
}

SpinConfig SpinConfig::flipped(int m) const {
    SpinConfig c = *this;
    c.spins_.at(static_cast<std::size_t>(m)) *= -1;
    return c;
}

Clause Clause::make(int i, int j, int k) {
    Clause c{{i, j, k}};
    std::sort(c.indices.begin(), c.indices.end());
    if (c.indices[0] < 0) {
        throw InputError("clause index must be nonnegative");
    }
    if (c.indices[0] == c.indices[1] || c.indices[1] == c.indices[2]) {
        throw InputError("clause (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) +
                         ") repeats a spin index");
    }
    return c;
}

namespace {

std::string clause_name(std::size_t pos, const Clause &c) {
    return "clause " + std::to_string(pos) + " [" + std::to_string(c.indices[0]) + "," +
           std::to_string(c.indices[1]) + "," + std::to_string(c.indices[2]) + "]";
}

// Per-clause cost as a function of how many of its bits are 1:
// spin sum = 2c - 3, so (2c - 4)^2.
constexpr std::int64_t kClauseCost[4] = {16, 4, 0, 4};

}  // namespace

void validate_structure(const Instance &inst) {
    if (inst.n < 1 || inst.n > 63) {
        throw InputError("spin count " + std::to_string(inst.n) + " out of range");
    }
    std::set<Clause> seen;
    for (std::size_t pos = 0; pos < inst.clauses.size(); ++pos) {
        const Clause &c = inst.clauses[pos];
        if (c.indices[0] < 0 || c.indices[2] >= inst.n || c.indices[0] >= c.indices[1] ||
            c.indices[1] >= c.indices[2]) {
            throw InputError(clause_name(pos, c) + " is invalid for n=" + std::to_string(inst.n) +
                             " (indices must be distinct, sorted, and below n)");
        }
        if (!seen.insert(c).second) {
            throw InputError(clause_name(pos, c) + " is a duplicate");
        }
    }
    if (inst.solution.size() != inst.n) {
        throw InputError("solution has length " + std::to_string(inst.solution.size()) + ", expected " +
                         std::to_string(inst.n));
    }
}

std::int64_t cost_of_config(const Instance &inst, const SpinConfig &cfg) {
    if (cfg.size() != inst.n) {
        throw InputError("config length " + std::to_string(cfg.size()) + " does not match n=" +
                         std::to_string(inst.n));
    }
    std::int64_t total = 0;
    for (const Clause &c : inst.clauses) {
        const std::int64_t s = cfg[c.indices[0]] + cfg[c.indices[1]] + cfg[c.indices[2]] - 1;
        total += s * s;
    }
    return total;
}

std::int64_t cost_of_index(const std::vector<Clause> &clauses, std::uint64_t index) {
    std::int64_t total = 0;
    for (const Clause &c : clauses) {
        total += kClauseCost[std::popcount(index & c.mask())];
    }
    return total;
}

Minima brute_force_minima(const Instance &inst) {
    if (inst.n > kMaxEnumerationSpins) {
        throw CapabilityError("brute-force enumeration supports n <= " + std::to_string(kMaxEnumerationSpins) +
                              ", got n=" + std::to_string(inst.n));
    }
    const std::uint64_t dim = std::uint64_t{1} << inst.n;
    Minima out;
    out.min_cost = INT64_MAX;
    std::vector<std::uint64_t> best;
    for (std::uint64_t k = 0; k < dim; ++k) {
        const std::int64_t cost = cost_of_index(inst.clauses, k);
        if (cost < out.min_cost) {
            out.min_cost = cost;
            best.clear();
        }
        if (cost == out.min_cost) {
            best.push_back(k);
        }
    }
    out.configs.reserve(best.size());
    for (auto k : best) {
        out.configs.push_back(SpinConfig::from_index(inst.n, k));
    }
    return out;
}

std::uint64_t triple_count(int n) {
    if (n < 3) {
        return 0;
    }
    const auto u = static_cast<std::uint64_t>(n);
    return u * (u - 1) * (u - 2) / 6;
}

std::optional<Instance> generate_instance(int n, int m, std::uint64_t seed) {
    if (n < 4) {
        throw InputError("generate_instance needs n >= 4, got " + std::to_string(n));
    }
    if (m < 1) {
        throw InputError("generate_instance needs m >= 1, got " + std::to_string(m));
    }
    if (static_cast<std::uint64_t>(m) > triple_count(n)) {
        throw InputError("m=" + std::to_string(m) + " exceeds the " + std::to_string(triple_count(n)) +
                         " distinct triples available for n=" + std::to_string(n));
    }
    if (n > kMaxEnumerationSpins) {
        throw CapabilityError("uniqueness certification supports n <= " +
                              std::to_string(kMaxEnumerationSpins));
    }

    // Partial Fisher-Yates over the lexicographic list of all triples.
    std::vector<Clause> all;
    all.reserve(static_cast<std::size_t>(triple_count(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                all.push_back(Clause{{i, j, k}});
            }
        }
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(all.size() - i));
        std::swap(all[i], all[j]);
    }
    all.resize(static_cast<std::size_t>(m));
    std::sort(all.begin(), all.end());

    Instance inst;
    inst.n = n;
    inst.clauses = std::move(all);
    inst.seed = seed;

    Minima minima = brute_force_minima(inst);
    if (minima.min_cost != 0 || minima.configs.size() != 1) {
        return std::nullopt;
    }
    inst.solution = std::move(minima.configs.front());
    return inst;
}

SearchOutcome find_instance(int n, int m, std::uint64_t master_seed, std::uint64_t first_attempt,
                            std::uint64_t budget) {
    SearchOutcome out;
    out.next_attempt = first_attempt;
    while (out.attempts < budget) {
        const std::uint64_t seed =
            derive_seed({master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m), out.next_attempt});
        ++out.next_attempt;
        ++out.attempts;
        if (auto inst = generate_instance(n, m, seed)) {
            out.instance = std::move(inst);
            break;
        }
    }
    return out;
}

int default_clause_count(int n) { return static_cast<int>(std::lround(kDefaultClauseRatio * n)); }

int hamming(const SpinConfig &a, const SpinConfig &b) {
    if (a.size() != b.size()) {
        throw InputError("hamming: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                         " differ");
    }
    int d = 0;
    for (int m = 0; m < a.size(); ++m) {
        d += a[m] != b[m];
    }
    return d;
}

SpinConfig flip_d_spins(const SpinConfig &cfg, int d, std::uint64_t seed) {
    const int n = cfg.size();
    if (d < 0 || d > n) {
        throw InputError("flip_d_spins: d=" + std::to_string(d) + " outside [0, " + std::to_string(n) + "]");
    }
    std::vector<int> positions(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        positions[static_cast<std::size_t>(m)] = m;
    }
    Rng rng(seed);
    std::vector<int> spins = cfg.spins();
    for (int i = 0; i < d; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(positions[static_cast<std::size_t>(i)], positions[j]);
        spins[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] *= -1;
    }
    return SpinConfig(std::move(spins));
}

}  // namespace qabias

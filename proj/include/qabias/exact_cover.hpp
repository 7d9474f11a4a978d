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

#ifndef QABIAS_EXACT_COVER_HPP
#define QABIAS_EXACT_COVER_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qabias {

/// Largest spin count for exhaustive enumeration.
inline constexpr int kMaxEnumerationSpins = 20;

/// A classical configuration of spins s_m in {-1, +1}.
///
/// Packed form: bit m of the basis index is (1 + s_m) / 2, so s = +1 <-> bit 1.
/// This is the one spin/bit convention used throughout the project.
class SpinConfig {
   public:
    SpinConfig() = default;
    /// Throws InputError if any entry is not +1 or -1.
    explicit SpinConfig(std::vector<int> spins);

    static SpinConfig from_index(int n, std::uint64_t index);
    /// Bit m at string position m; characters '0' or '1'.
    static SpinConfig from_bits(std::string_view bits);
    static SpinConfig all_up(int n);

    int size() const { return static_cast<int>(spins_.size()); }
    int operator[](int m) const { return spins_[static_cast<std::size_t>(m)]; }
    const std::vector<int> &spins() const { return spins_; }

    std::uint64_t index() const;
    std::string bits() const;
    SpinConfig negated() const;
    SpinConfig flipped(int m) const;

    friend bool operator==(const SpinConfig &, const SpinConfig &) = default;

   private:
    std::vector<int> spins_;
};

/// Three distinct spin indices, sorted ascending.
struct Clause {
    std::array<int, 3> indices{};

    /// Sorts the indices; throws InputError on repeats or negative values.
    static Clause make(int i, int j, int k);
    std::uint64_t mask() const {
        return (std::uint64_t{1} << indices[0]) | (std::uint64_t{1} << indices[1]) |
               (std::uint64_t{1} << indices[2]);
    }

    friend auto operator<=>(const Clause &, const Clause &) = default;
};

/// Exact-cover instance with a certified unique satisfying assignment.
struct Instance {
    int n = 0;
    std::vector<Clause> clauses;
    SpinConfig solution;
    std::uint64_t seed = 0;

    int m() const { return static_cast<int>(clauses.size()); }
};

/// Checks the structural invariants that do not need enumeration: clause
/// indices in range, no duplicates, solution length. Throws InputError
/// naming the offending clause.
void validate_structure(const Instance &inst);

/// Sum over clauses of (s_i + s_j + s_k - 1)^2.
std::int64_t cost_of_config(const Instance &inst, const SpinConfig &cfg);

/// Same cost for a packed basis index. No length checks.
std::int64_t cost_of_index(const std::vector<Clause> &clauses, std::uint64_t index);

struct Minima {
    std::int64_t min_cost = 0;
    std::vector<SpinConfig> configs;  // ascending packed index
};

/// Exhaustive minimum over all 2^n configurations. Throws CapabilityError
/// for n above kMaxEnumerationSpins.
Minima brute_force_minima(const Instance &inst);

/// Number of distinct sorted index triples, C(n, 3).
std::uint64_t triple_count(int n);

/// Draws m distinct clauses from a generator seeded by `seed` and certifies
/// uniqueness by enumeration. Returns nullopt when the draw has no satisfying
/// assignment or more than one; the caller moves on to another seed.
std::optional<Instance> generate_instance(int n, int m, std::uint64_t seed);

/// Tries seeds derive_seed({master, n, m, attempt}) for attempt = first,
/// first+1, ... until an instance is accepted or `budget` attempts are spent.
struct SearchOutcome {
    std::optional<Instance> instance;
    std::uint64_t next_attempt = 0;
    std::uint64_t attempts = 0;
};
SearchOutcome find_instance(int n, int m, std::uint64_t master_seed, std::uint64_t first_attempt,
                            std::uint64_t budget);

/// Default clause count for n spins: round(0.7 * n).
inline constexpr double kDefaultClauseRatio = 0.7;
int default_clause_count(int n);

int hamming(const SpinConfig &a, const SpinConfig &b);

/// Flips exactly d distinct positions picked uniformly by a seeded generator.
SpinConfig flip_d_spins(const SpinConfig &cfg, int d, std::uint64_t seed);

}  // namespace qabias

#endif

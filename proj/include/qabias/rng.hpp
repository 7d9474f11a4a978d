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

#ifndef QABIAS_RNG_HPP
#define QABIAS_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qabias {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from an ordered list of words:
///   h = 0; for w in words: h = mix64(h ^ mix64(w))
/// Used for every per-run and per-instance seed so results never depend on
/// the order in which work is scheduled.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0;
    for (auto w : words) {
        h = mix64(h ^ mix64(w));
    }
    return h;
}

/// Seeded generator with portable bounded draws. std::mt19937_64 output is
/// fixed by the standard; the distributions in <random> are not, so the
/// integer and real draws are implemented here.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection on the top of the range removes modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qabias

#endif

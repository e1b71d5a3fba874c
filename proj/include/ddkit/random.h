// Copyright 2026 The ddkit Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace ddkit {

/// SplitMix64 finalizer. Stable across platforms and releases.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of words into one seed.
template <typename... Words>
constexpr std::uint64_t stable_hash(std::uint64_t first, Words... rest) {
    std::uint64_t h = mix64(first);
    ((h = mix64(h ^ static_cast<std::uint64_t>(rest))), ...);
    return h;
}

using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits; unlike std::uniform_real_distribution
/// this is identical on every standard library.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ddkit

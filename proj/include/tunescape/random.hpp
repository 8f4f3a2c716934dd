// Copyright 2026 The Tunescape Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Portable random helpers on top of std::mt19937_64. The standard engine is
// fully specified, but the standard distributions are not, so bounded draws,
// shuffles and normals are defined here to keep seeded outputs identical across
// standard library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace tunescape {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; consumes two draws per call.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates over the first `prefix` positions. The first k elements after
// shuffling with prefix >= k do not depend on prefix, so a partial shuffle is a
// prefix of the full one.
template <typename T>
void shuffle_prefix(std::span<T> items, std::size_t prefix, Rng& rng) {
  const std::size_t n = items.size();
  if (prefix > n) prefix = n;
  for (std::size_t i = 0; i < prefix && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    if (j != i) std::swap(items[i], items[j]);
  }
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  shuffle_prefix(items, items.size(), rng);
}

}  // namespace tunescape

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

// Test-only references for the analyses: exact convergence medians by
// enumerating every ordering, and brute-force speedup/distribution numbers.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace tunescape::testing {

// Median (over all orderings of `objectives`) of the best-so-far relative
// performance at every budget. The population median is the smallest value v
// with P(X <= v) >= 1/2; callers pick datasets where that CDF never sits at
// exactly 1/2, so the sample median of a large run converges to it.
inline std::vector<double> exact_convergence_median(std::vector<double> objectives) {
  std::sort(objectives.begin(), objectives.end());
  const double optimum = objectives.front();
  const std::size_t n = objectives.size();
  std::vector<std::map<double, double>> mass(n);  // budget -> value -> count
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  double total = 0.0;
  do {
    double best = objectives[perm[0]];
    for (std::size_t b = 0; b < n; ++b) {
      best = std::min(best, objectives[perm[b]]);
      mass[b][optimum / best] += 1.0;
    }
    total += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<double> out;
  for (const auto& dist : mass) {
    double acc = 0.0;
    for (const auto& [value, count] : dist) {
      acc += count;
      if (acc / total >= 0.5) {
        out.push_back(value);
        break;
      }
    }
  }
  return out;
}

inline double brute_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// R type 7 quantile, written out from its definition.
inline double brute_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace tunescape::testing

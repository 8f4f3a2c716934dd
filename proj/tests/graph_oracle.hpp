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

// Test-only references for the landscape module: a dense-matrix PageRank and an
// all-pairs fitness-flow edge enumeration. Both are deliberately naive.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <utility>
#include <vector>

#include "tunescape/dataset.hpp"

namespace tunescape::testing {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Dense power iteration on the full Google matrix G = d * M + (1 - d)/n * 1,
// where column j of M spreads node j's mass over its successors (or uniformly
// over all nodes when j has none). Runs until the L1 change is below 1e-15 or
// 1000 sweeps have passed (0.85^1000 leaves no measurable error).
inline std::vector<double> dense_pagerank(std::size_t n, const EdgeList& edges,
                                          double damping = 0.85) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<std::size_t> outdeg(n, 0);
  for (const auto& e : edges) ++outdeg[e.first];
  for (const auto& [src, dst] : edges) m[dst][src] += 1.0 / static_cast<double>(outdeg[src]);
  for (std::size_t j = 0; j < n; ++j)
    if (outdeg[j] == 0)
      for (std::size_t i = 0; i < n; ++i) m[i][j] = 1.0 / static_cast<double>(n);
  const double teleport = (1.0 - damping) / static_cast<double>(n);
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
  for (int iter = 0; iter < 1000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (damping * m[i][j] + teleport) * x[j];
      y[i] = s;
    }
    double delta = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta += std::abs(y[i] - x[i]);
      total += y[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / total;
    if (delta < 1e-15) break;
  }
  return x;
}

// Random digraph on n nodes with independent edge probability `density`.
inline EdgeList random_digraph(std::mt19937_64& rng, std::size_t n, double density) {
  std::bernoulli_distribution coin(density);
  EdgeList edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && coin(rng)) edges.emplace_back(u, v);
  return edges;
}

// Node positions follow valid_subset order. Two configurations are neighbours
// when they differ in exactly one parameter, by exactly one ordinal for
// adjacent moves or by any amount for hamming moves.
inline EdgeList brute_force_edges(const DeviceDataset& ds, bool hamming) {
  const auto valid = valid_subset(ds);
  std::vector<std::vector<std::size_t>> ords;
  for (const auto& m : valid) {
    std::vector<std::size_t> o;
    const auto& params = ds.space().parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      std::size_t k = 0;
      while (params[p].values[k] != m.config.values[p]) ++k;
      o.push_back(k);
    }
    ords.push_back(std::move(o));
  }
  EdgeList edges;
  for (std::size_t a = 0; a < valid.size(); ++a) {
    for (std::size_t b = 0; b < valid.size(); ++b) {
      std::size_t differing = 0, gap = 0;
      for (std::size_t p = 0; p < ords[a].size(); ++p) {
        if (ords[a][p] != ords[b][p]) {
          ++differing;
          gap = ords[a][p] > ords[b][p] ? ords[a][p] - ords[b][p] : ords[b][p] - ords[a][p];
        }
      }
      const bool adjacent = differing == 1 && (hamming || gap == 1);
      if (adjacent && valid[b].objective < valid[a].objective) edges.emplace_back(a, b);
    }
  }
  return edges;
}

}  // namespace tunescape::testing

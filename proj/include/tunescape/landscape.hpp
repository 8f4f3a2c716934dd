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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tunescape/dataset.hpp"
#include "tunescape/space.hpp"

namespace tunescape {

// adjacent1: one parameter moved by one ordinal position.
// hamming1: one parameter changed to any other value of its domain.
enum class Neighborhood { adjacent1, hamming1 };

std::string_view to_string(Neighborhood n);
// Throws ValueError.
Neighborhood parse_neighborhood(std::string_view name);

// Neighbours of a configuration inside the space's index range (constraints are
// not applied), in parameter order then ordinal order.
std::vector<ConfigIndex> neighbors(const ParameterSpace& space, ConfigIndex index,
                                   Neighborhood policy);

// Compressed adjacency over nodes 0..n-1.
class Digraph {
 public:
  Digraph() = default;
  // Edges may come in any order; duplicates are kept.
  Digraph(std::size_t nodes, std::span<const std::pair<std::size_t, std::size_t>> edges);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  std::span<const std::size_t> successors(std::size_t node) const {
    return {targets_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::size_t out_degree(std::size_t node) const { return offsets_[node + 1] - offsets_[node]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
};

// Nodes are the valid measured configurations in index order; an edge a -> b
// exists when b is a neighbour of a and f(b) < f(a) strictly.
class FitnessFlowGraph {
 public:
  FitnessFlowGraph(std::vector<ConfigIndex> nodes, std::vector<double> fitness, Digraph graph);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<ConfigIndex>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& fitness() const noexcept { return fitness_; }
  const Digraph& graph() const noexcept { return graph_; }

  // Node position of a configuration index, or size() when absent.
  std::size_t find(ConfigIndex index) const;

  // Sinks in node order. These are the local minima.
  std::vector<std::size_t> sinks() const;

 private:
  std::vector<ConfigIndex> nodes_;
  std::vector<double> fitness_;
  Digraph graph_;
};

// Throws EmptyDataset when the dataset has no valid records.
FitnessFlowGraph build_ffg(const DeviceDataset& ds, Neighborhood policy = Neighborhood::adjacent1);

// Kahn's algorithm; returns false when the graph has a cycle.
bool is_acyclic(const Digraph& g);

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-10;
  std::size_t max_iterations = 100'000;
};

// Power iteration on the column-stochastic transition matrix with uniform
// teleportation; the mass of dangling nodes is spread uniformly. Stops when the
// L1 change between iterates drops below the tolerance.
std::vector<double> pagerank(const Digraph& g, const PageRankOptions& options = {});

enum class CentralityDenominator { minima, all_nodes };

struct CentralityResult {
  std::vector<double> pagerank;
  std::vector<std::size_t> minima;       // node positions
  std::vector<std::size_t> good_minima;  // minima with f < (1 + p) * f_opt
  double proportion = 0.0;
  double p = 0.0;
  double optimum = 0.0;
};

// Share of PageRank mass held by local minima with fitness below
// (1 + p) * f_opt, relative to the mass of all minima (or all nodes).
CentralityResult proportion_of_centrality(
    const FitnessFlowGraph& g, std::vector<double> pagerank, double p,
    CentralityDenominator denominator = CentralityDenominator::minima);

struct ArrivalFrequency {
  ConfigIndex minimum;
  double frequency = 0.0;
};

// Randomized first-improvement descents from uniformly drawn valid starts,
// choosing uniformly among strictly improving neighbours at every step. Walk i
// uses a generator seeded with seed + i. Every minimum is listed, in node
// order, including those never reached.
std::vector<ArrivalFrequency> arrival_frequencies(const FitnessFlowGraph& g, std::size_t walks,
                                                  std::uint64_t seed, unsigned jobs = 1);
std::vector<ArrivalFrequency> arrival_frequencies(const DeviceDataset& ds, Neighborhood policy,
                                                  std::size_t walks, std::uint64_t seed,
                                                  unsigned jobs = 1);

// Edge list CSV "src_index,dst_index" using configuration indices.
std::string edge_list_csv(const FitnessFlowGraph& g);
nlohmann::json minima_summary(const FitnessFlowGraph& g, const CentralityResult& result);

}  // namespace tunescape

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

#include "tunescape/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tunescape/error.hpp"
#include "tunescape/parallel.hpp"
#include "tunescape/random.hpp"

namespace tunescape {

std::string_view to_string(Neighborhood n) {
  return n == Neighborhood::adjacent1 ? "adjacent1" : "hamming1";
}

Neighborhood parse_neighborhood(std::string_view name) {
  if (name == "adjacent1") return Neighborhood::adjacent1;
  if (name == "hamming1") return Neighborhood::hamming1;
  throw ValueError("unknown neighborhood '" + std::string(name) + "'");
}

std::vector<ConfigIndex> neighbors(const ParameterSpace& space, ConfigIndex index,
                                   Neighborhood policy) {
  std::vector<ConfigIndex> out;
  const auto& strides = space.strides();
  for (std::size_t p = 0; p < space.dimension(); ++p) {
    const std::uint64_t dim = space.parameters()[p].values.size();
    const std::uint64_t ord = (index.value / strides[p]) % dim;
    const std::uint64_t base = index.value - ord * strides[p];
    if (policy == Neighborhood::adjacent1) {
      if (ord > 0) out.push_back(ConfigIndex{base + (ord - 1) * strides[p]});
      if (ord + 1 < dim) out.push_back(ConfigIndex{base + (ord + 1) * strides[p]});
    } else {
      for (std::uint64_t o = 0; o < dim; ++o)
        if (o != ord) out.push_back(ConfigIndex{base + o * strides[p]});
    }
  }
  return out;
}

Digraph::Digraph(std::size_t nodes, std::span<const std::pair<std::size_t, std::size_t>> edges)
    : offsets_(nodes + 1, 0), targets_(edges.size()) {
  for (const auto& [src, dst] : edges) ++offsets_[src + 1];
  for (std::size_t i = 0; i < nodes; ++i) offsets_[i + 1] += offsets_[i];
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [src, dst] : edges) targets_[cursor[src]++] = dst;
}

FitnessFlowGraph::FitnessFlowGraph(std::vector<ConfigIndex> nodes, std::vector<double> fitness,
                                   Digraph graph)
    : nodes_(std::move(nodes)), fitness_(std::move(fitness)), graph_(std::move(graph)) {}

std::size_t FitnessFlowGraph::find(ConfigIndex index) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), index);
  if (it == nodes_.end() || *it != index) return nodes_.size();
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::size_t> FitnessFlowGraph::sinks() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (graph_.out_degree(i) == 0) out.push_back(i);
  return out;
}

FitnessFlowGraph build_ffg(const DeviceDataset& ds, Neighborhood policy) {
  const auto valid = valid_subset(ds);
  if (valid.empty()) throw EmptyDataset("dataset '" + ds.device() + "' has no valid records");
  std::vector<ConfigIndex> nodes;
  std::vector<double> fitness;
  nodes.reserve(valid.size());
  fitness.reserve(valid.size());
  for (const auto& m : valid) {
    nodes.push_back(m.index);
    fitness.push_back(m.objective);
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (const auto nb : neighbors(ds.space(), nodes[a], policy)) {
      const auto it = std::lower_bound(nodes.begin(), nodes.end(), nb);
      if (it == nodes.end() || *it != nb) continue;
      const auto b = static_cast<std::size_t>(it - nodes.begin());
      if (fitness[b] < fitness[a]) edges.emplace_back(a, b);
    }
  }
  Digraph graph(nodes.size(), edges);
  return FitnessFlowGraph(std::move(nodes), std::move(fitness), std::move(graph));
}

bool is_acyclic(const Digraph& g) {
  std::vector<std::size_t> indegree(g.size(), 0);
  for (std::size_t u = 0; u < g.size(); ++u)
    for (const auto v : g.successors(u)) ++indegree[v];
  std::vector<std::size_t> ready;
  for (std::size_t u = 0; u < g.size(); ++u)
    if (indegree[u] == 0) ready.push_back(u);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto u = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto v : g.successors(u))
      if (--indegree[v] == 0) ready.push_back(v);
  }
  return visited == g.size();
}

std::vector<double> pagerank(const Digraph& g, const PageRankOptions& options) {
  const std::size_t n = g.size();
  if (n == 0) return {};
  const double d = options.damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n), next(n);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      if (g.out_degree(u) == 0) dangling += rank[u];
    const double floor = (1.0 - d) * inv_n + d * dangling * inv_n;
    std::fill(next.begin(), next.end(), floor);
    for (std::size_t u = 0; u < n; ++u) {
      const auto succ = g.successors(u);
      if (succ.empty()) continue;
      const double share = d * rank[u] / static_cast<double>(succ.size());
      for (const auto v : succ) next[v] += share;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - rank[i]);
    rank.swap(next);
    if (change < options.tolerance) break;
  }
  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (auto& r : rank) r /= total;
  return rank;
}

CentralityResult proportion_of_centrality(const FitnessFlowGraph& g, std::vector<double> pr,
                                          double p, CentralityDenominator denominator) {
  if (g.size() == 0) throw EmptyDataset("empty fitness flow graph");
  if (!(p >= 0.0)) throw ValueError("proportion of centrality needs p >= 0");
  if (pr.size() != g.size()) throw ValueError("pagerank vector does not match the graph");
  CentralityResult result;
  result.p = p;
  result.minima = g.sinks();
  // A finite DAG always has a sink.
  if (result.minima.empty()) throw ValueError("graph has no local minima");
  result.optimum = *std::min_element(g.fitness().begin(), g.fitness().end());
  const double cutoff = (1.0 + p) * result.optimum;
  double good = 0.0, all = 0.0;
  for (const auto m : result.minima) {
    all += pr[m];
    // The global optimum always qualifies, including at p = 0.
    if (g.fitness()[m] < cutoff || g.fitness()[m] == result.optimum) {
      good += pr[m];
      result.good_minima.push_back(m);
    }
  }
  if (denominator == CentralityDenominator::all_nodes)
    all = std::accumulate(pr.begin(), pr.end(), 0.0);
  result.proportion = all > 0.0 ? std::min(1.0, good / all) : 0.0;
  result.pagerank = std::move(pr);
  return result;
}

std::vector<ArrivalFrequency> arrival_frequencies(const FitnessFlowGraph& g, std::size_t walks,
                                                  std::uint64_t seed, unsigned jobs) {
  if (g.size() == 0) throw EmptyDataset("empty fitness flow graph");
  const auto& graph = g.graph();
  std::vector<std::size_t> terminal(walks);
  parallel_for(walks, jobs, [&](std::size_t w) {
    Rng rng = make_rng(seed + w);
    std::size_t at = static_cast<std::size_t>(uniform_below(rng, g.size()));
    for (auto succ = graph.successors(at); !succ.empty(); succ = graph.successors(at))
      at = succ[static_cast<std::size_t>(uniform_below(rng, succ.size()))];
    terminal[w] = at;
  });
  std::vector<std::size_t> counts(g.size(), 0);
  for (const auto t : terminal) ++counts[t];
  std::vector<ArrivalFrequency> out;
  for (const auto m : g.sinks())
    out.push_back({g.nodes()[m], walks == 0 ? 0.0
                                            : static_cast<double>(counts[m]) /
                                                  static_cast<double>(walks)});
  return out;
}

std::vector<ArrivalFrequency> arrival_frequencies(const DeviceDataset& ds, Neighborhood policy,
                                                  std::size_t walks, std::uint64_t seed,
                                                  unsigned jobs) {
  return arrival_frequencies(build_ffg(ds, policy), walks, seed, jobs);
}

std::string edge_list_csv(const FitnessFlowGraph& g) {
  std::string out = "src_index,dst_index\n";
  for (std::size_t u = 0; u < g.size(); ++u)
    for (const auto v : g.graph().successors(u))
      out += std::to_string(g.nodes()[u].value) + "," + std::to_string(g.nodes()[v].value) + "\n";
  return out;
}

nlohmann::json minima_summary(const FitnessFlowGraph& g, const CentralityResult& result) {
  nlohmann::json minima = nlohmann::json::array();
  for (const auto m : result.minima) {
    const bool good =
        std::find(result.good_minima.begin(), result.good_minima.end(), m) !=
        result.good_minima.end();
    minima.push_back({{"index", g.nodes()[m].value},
                      {"fitness", g.fitness()[m]},
                      {"pagerank", result.pagerank[m]},
                      {"qualifies", good}});
  }
  return {{"nodes", g.size()},
          {"edges", g.graph().edge_count()},
          {"optimum", result.optimum},
          {"p", result.p},
          {"proportion", result.proportion},
          {"minima", std::move(minima)}};
}

}  // namespace tunescape

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

#include "tunescape/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tunescape/error.hpp"
#include "tunescape/parallel.hpp"
#include "tunescape/random.hpp"

namespace tunescape {

std::vector<Sample> to_samples(std::span<const Measurement> measurements) {
  std::vector<Sample> out;
  out.reserve(measurements.size());
  for (const auto& m : measurements) {
    Sample s;
    s.features.assign(m.config.values.begin(), m.config.values.end());
    s.target = m.objective;
    out.push_back(std::move(s));
  }
  return out;
}

double RegressionTree::predict(std::span<const double> x) const {
  std::uint32_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& n = nodes[at];
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[at].value;
}

RegressionForest::RegressionForest(std::size_t features, double base, double learning_rate,
                                   std::vector<RegressionTree> trees)
    : features_(features), base_(base), learning_rate_(learning_rate), trees_(std::move(trees)) {}

double RegressionForest::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return base_ + learning_rate_ * sum;
}

std::vector<double> RegressionForest::predict(std::span<const Sample> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r.features));
  return out;
}

std::vector<bool> RegressionForest::used_features() const {
  std::vector<bool> used(features_, false);
  for (const auto& t : trees_)
    for (const auto& n : t.nodes)
      if (n.feature >= 0) used[static_cast<std::size_t>(n.feature)] = true;
  return used;
}

nlohmann::json RegressionForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"features", features_},
          {"base", base_},
          {"learning_rate", learning_rate_},
          {"trees", std::move(trees)}};
}

RegressionForest RegressionForest::from_json(const nlohmann::json& doc) {
  try {
    const auto features = doc.at("features").get<std::size_t>();
    std::vector<RegressionTree> trees;
    for (const auto& t : doc.at("trees")) {
      RegressionTree tree;
      for (const auto& n : t.at("nodes")) {
        RegressionTree::Node node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::uint32_t>();
        node.right = n.at("right").get<std::uint32_t>();
        node.value = n.at("value").get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) throw SchemaError("model tree without nodes");
      for (const auto& node : tree.nodes) {
        if (node.feature >= static_cast<int>(features) ||
            (node.feature >= 0 && (node.left >= tree.nodes.size() || node.right >= tree.nodes.size())))
          throw SchemaError("model tree node out of range");
      }
      trees.push_back(std::move(tree));
    }
    return RegressionForest(features, doc.at("base").get<double>(),
                            doc.at("learning_rate").get<double>(), std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid model JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

using RowList = std::vector<std::uint32_t>;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const Sample> rows, std::span<const double> residual, std::size_t depth)
      : rows_(rows), residual_(residual), max_depth_(depth) {}

  // sorted[f] lists the node's rows ordered by feature f.
  RegressionTree build(std::vector<RowList> sorted) {
    tree_.nodes.clear();
    grow(std::move(sorted), 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::vector<RowList> sorted, std::size_t depth) {
    const RowList& rows = sorted.front();
    double sum = 0.0;
    for (const auto r : rows) sum += residual_[r];
    const auto at = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes[at].value = sum / static_cast<double>(rows.size());
    if (depth >= max_depth_ || rows.size() < 2) return at;

    const Split split = best_split(sorted, sum);
    if (split.feature < 0) return at;

    const auto f = static_cast<std::size_t>(split.feature);
    std::vector<RowList> left(sorted.size()), right(sorted.size());
    for (std::size_t g = 0; g < sorted.size(); ++g) {
      for (const auto r : sorted[g]) {
        if (rows_[r].features[f] <= split.threshold)
          left[g].push_back(r);
        else
          right[g].push_back(r);
      }
    }
    sorted.clear();
    tree_.nodes[at].feature = split.feature;
    tree_.nodes[at].threshold = split.threshold;
    const auto l = grow(std::move(left), depth + 1);
    tree_.nodes[at].left = l;
    const auto r = grow(std::move(right), depth + 1);
    tree_.nodes[at].right = r;
    return at;
  }

  Split best_split(const std::vector<RowList>& sorted, double total) const {
    Split best;
    const auto n = static_cast<double>(sorted.front().size());
    const double parent = total * total / n;
    // Gains below this are rounding noise.
    const double min_gain = 1e-12 * std::max(1.0, std::abs(parent));
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      const RowList& order = sorted[f];
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left_sum += residual_[order[i]];
        const double x = rows_[order[i]].features[f];
        const double x_next = rows_[order[i + 1]].features[f];
        if (!(x < x_next)) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
        if (gain > min_gain && gain > best.gain) {
          double threshold = x + (x_next - x) / 2.0;
          if (!(threshold > x && threshold < x_next)) threshold = x;
          best = Split{static_cast<int>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  std::span<const Sample> rows_;
  std::span<const double> residual_;
  std::size_t max_depth_;
  RegressionTree tree_;
};

}  // namespace

RegressionForest fit(std::span<const Sample> train, const BoostingParams& params) {
  if (train.size() < 2) throw TooFewRows("boosting needs at least 2 training rows");
  const std::size_t features = train.front().features.size();
  for (const auto& s : train)
    if (s.features.size() != features) throw ValueError("training rows differ in feature count");
  if (params.learning_rate <= 0.0) throw ValueError("learning rate must be positive");

  const auto n = train.size();
  double base = 0.0;
  for (const auto& s : train) base += s.target;
  base /= static_cast<double>(n);
  bool constant = true;
  for (const auto& s : train)
    if (s.target != train.front().target) constant = false;
  if (constant) throw DegenerateTarget("training targets have zero variance");

  // Global per-feature row orders; node lists are stable partitions of these.
  std::vector<RowList> presorted(features, RowList(n));
  for (std::size_t f = 0; f < features; ++f) {
    std::iota(presorted[f].begin(), presorted[f].end(), 0u);
    std::stable_sort(presorted[f].begin(), presorted[f].end(), [&](std::uint32_t a, std::uint32_t b) {
      return train[a].features[f] < train[b].features[f];
    });
  }

  std::vector<double> prediction(n, base), residual(n);
  std::vector<RegressionTree> trees;
  trees.reserve(params.trees);
  Rng rng = make_rng(params.seed);
  const bool subsample = params.subsample > 0.0 && params.subsample < 1.0;
  std::vector<std::uint32_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0u);
  std::vector<char> in_bag(n, 1);

  for (std::size_t t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = train[i].target - prediction[i];
    std::vector<RowList> sorted;
    if (features == 0) {
      sorted.push_back(all_rows);
    } else if (subsample) {
      auto bag = all_rows;
      const auto take = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));
      shuffle_prefix(std::span(bag), take, rng);
      std::fill(in_bag.begin(), in_bag.end(), 0);
      for (std::size_t i = 0; i < std::min(take, n); ++i) in_bag[bag[i]] = 1;
      sorted.resize(features);
      for (std::size_t f = 0; f < features; ++f)
        for (const auto r : presorted[f])
          if (in_bag[r]) sorted[f].push_back(r);
    } else {
      sorted = presorted;
    }
    TreeBuilder builder(train, residual, params.depth);
    trees.push_back(builder.build(std::move(sorted)));
    const auto& tree = trees.back();
    for (std::size_t i = 0; i < n; ++i)
      prediction[i] += params.learning_rate * tree.predict(train[i].features);
  }
  return RegressionForest(features, base, params.learning_rate, std::move(trees));
}

double r2_score(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty()) throw EmptyDataset("R^2 of an empty hold-out set");
  if (truth.size() != predicted.size()) throw ValueError("R^2: length mismatch");
  double mean = 0.0;
  for (const auto y : truth) mean += y;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
  }
  if (ss_tot == 0.0) throw DegenerateTarget("hold-out targets have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double r2(const RegressionForest& model, std::span<const Sample> holdout) {
  std::vector<double> truth;
  truth.reserve(holdout.size());
  for (const auto& s : holdout) truth.push_back(s.target);
  return r2_score(truth, model.predict(holdout));
}

std::optional<double> ImportanceMap::get(std::string_view parameter) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i] == parameter) return importance[i];
  return std::nullopt;
}

ImportanceMap permutation_importance(const RegressionForest& model,
                                     std::span<const Sample> holdout,
                                     std::span<const std::string> parameter_names,
                                     std::size_t repeats, std::uint64_t seed, unsigned jobs) {
  const std::size_t features = model.feature_count();
  if (parameter_names.size() != features)
    throw ValueError("parameter names do not match the model's features");
  if (repeats == 0) throw ValueError("permutation importance needs at least one repeat");
  std::vector<double> truth;
  truth.reserve(holdout.size());
  for (const auto& s : holdout) truth.push_back(s.target);

  ImportanceMap out;
  out.parameters.assign(parameter_names.begin(), parameter_names.end());
  out.importance.assign(features, 0.0);
  out.r2_baseline = r2_score(truth, model.predict(holdout));

  parallel_for(features, jobs, [&](std::size_t f) {
    std::vector<double> column(holdout.size());
    std::vector<double> row;
    std::vector<double> predicted(holdout.size());
    double drop = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      for (std::size_t i = 0; i < holdout.size(); ++i) column[i] = holdout[i].features[f];
      Rng rng = make_rng(seed + f * repeats + r);
      shuffle(std::span(column), rng);
      for (std::size_t i = 0; i < holdout.size(); ++i) {
        row = holdout[i].features;
        row[f] = column[i];
        predicted[i] = model.predict(row);
      }
      drop += out.r2_baseline - r2_score(truth, predicted);
    }
    out.importance[f] = drop / static_cast<double>(repeats);
  });
  return out;
}

TrainHoldout split_train_holdout(std::span<const Measurement> rows, double train_fraction,
                                 std::uint64_t seed) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  shuffle(std::span(order), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(rows.size())));
  TrainHoldout out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& m = rows[order[i]];
    Sample s{std::vector<double>(m.config.values.begin(), m.config.values.end()), m.objective};
    (i < n_train ? out.train : out.holdout).push_back(std::move(s));
  }
  return out;
}

ParameterSpace reduce_space(const ParameterSpace& space,
                            const std::map<std::string, ImportanceMap>& importances,
                            double threshold,
                            const std::map<std::string, Configuration>& anchors) {
  std::vector<Parameter> params;
  for (std::size_t p = 0; p < space.dimension(); ++p) {
    const auto& param = space.parameters()[p];
    std::optional<double> top;
    for (const auto& [device, map] : importances)
      if (const auto score = map.get(param.name)) top = top ? std::max(*top, *score) : *score;
    if (!top || *top >= threshold || anchors.empty()) {
      params.push_back(param);
      continue;
    }
    std::vector<std::int64_t> kept;
    for (const auto& [device, config] : anchors) {
      if (config.values.size() != space.dimension())
        throw InvalidConfiguration("anchor for '" + device + "' has the wrong arity");
      kept.push_back(config.values[p]);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    params.push_back(Parameter{param.name, std::move(kept)});
  }
  return ParameterSpace(space.name() + "-reduced", std::move(params), space.constraint_sources());
}

std::string importance_csv(const std::map<std::string, ImportanceMap>& importances) {
  std::string out = "device,parameter,importance\n";
  char buf[64];
  for (const auto& [device, map] : importances) {
    for (std::size_t i = 0; i < map.parameters.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", map.importance[i]);
      out += device + "," + map.parameters[i] + "," + buf + "\n";
    }
  }
  return out;
}

}  // namespace tunescape

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
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tunescape/dataset.hpp"
#include "tunescape/space.hpp"

namespace tunescape {

// One training or hold-out row: raw parameter values as features.
struct Sample {
  std::vector<double> features;
  double target = 0.0;
};

std::vector<Sample> to_samples(std::span<const Measurement> measurements);

struct BoostingParams {
  std::size_t trees = 200;
  std::size_t depth = 6;
  double learning_rate = 0.1;
  // Fraction of rows drawn (without replacement) per tree; 1.0 uses all rows
  // and makes the seed irrelevant.
  double subsample = 1.0;
  std::uint64_t seed = 0;
};

// Depth-limited binary regression tree stored as a node array. Leaves have
// feature == -1.
struct RegressionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;  // rows with x[feature] <= threshold go left
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
};

// prediction = base + learning_rate * sum of tree outputs.
class RegressionForest {
 public:
  RegressionForest(std::size_t features, double base, double learning_rate,
                   std::vector<RegressionTree> trees);

  double predict(std::span<const double> x) const;
  std::vector<double> predict(std::span<const Sample> rows) const;

  std::size_t feature_count() const noexcept { return features_; }
  double base() const noexcept { return base_; }
  double learning_rate() const noexcept { return learning_rate_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

  // Features referenced by at least one split.
  std::vector<bool> used_features() const;

  nlohmann::json to_json() const;
  // Throws SchemaError.
  static RegressionForest from_json(const nlohmann::json& doc);

 private:
  std::size_t features_;
  double base_;
  double learning_rate_;
  std::vector<RegressionTree> trees_;
};

// Least-squares gradient boosting with exact split search. Split ties go to the
// lowest feature index, then the lowest threshold. Throws TooFewRows (< 2
// rows) or DegenerateTarget (zero target variance).
RegressionForest fit(std::span<const Sample> train, const BoostingParams& params = {});

// 1 - SS_res / SS_tot. Throws DegenerateTarget when the hold-out targets are
// constant, EmptyDataset when it is empty.
double r2(const RegressionForest& model, std::span<const Sample> holdout);
double r2_score(std::span<const double> truth, std::span<const double> predicted);

struct ImportanceMap {
  std::vector<std::string> parameters;
  std::vector<double> importance;  // mean R^2 drop per parameter
  double r2_baseline = 0.0;

  // Score of a parameter, or nullopt when it is not listed.
  std::optional<double> get(std::string_view parameter) const;
};

// For each feature, the mean over `repeats` shuffles of the hold-out column of
// (baseline R^2 - shuffled R^2). The model is not retrained. Shuffle r of
// feature j uses seed + j * repeats + r.
ImportanceMap permutation_importance(const RegressionForest& model,
                                     std::span<const Sample> holdout,
                                     std::span<const std::string> parameter_names,
                                     std::size_t repeats, std::uint64_t seed, unsigned jobs = 1);

struct TrainHoldout {
  std::vector<Sample> train;
  std::vector<Sample> holdout;
};

// Seeded shuffle of the rows (taken in index order), first
// round(train_fraction * n) go to training.
TrainHoldout split_train_holdout(std::span<const Measurement> rows, double train_fraction,
                                 std::uint64_t seed);

// Parameters whose best importance over devices reaches the threshold keep
// their domain. Every other parameter keeps only the values taken by the
// anchor configurations. Parameters without any importance score, or without
// anchors, keep their domain.
ParameterSpace reduce_space(const ParameterSpace& space,
                            const std::map<std::string, ImportanceMap>& importances,
                            double threshold,
                            const std::map<std::string, Configuration>& anchors);

std::string importance_csv(const std::map<std::string, ImportanceMap>& importances);

}  // namespace tunescape

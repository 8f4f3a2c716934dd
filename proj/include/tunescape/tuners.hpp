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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunescape/dataset.hpp"
#include "tunescape/landscape.hpp"
#include "tunescape/space.hpp"

namespace tunescape {

// One backend call: the mean objective over `samples` repetitions, or a
// failure status.
struct BackendResult {
  Status status = Status::ok;
  std::optional<double> objective;
};

class ObjectiveBackend {
 public:
  virtual ~ObjectiveBackend() = default;
  // Throws InvalidConfig for configurations the backend cannot evaluate and
  // BackendFailure when the measurement machinery itself fails.
  virtual BackendResult measure(const Configuration& config, std::uint32_t samples) = 0;
  virtual std::string describe() const = 0;
};

// Looks measurements up in a dataset. Repeated samples return the stored value.
class TableBackend final : public ObjectiveBackend {
 public:
  explicit TableBackend(const DeviceDataset& ds) : ds_(&ds) {}
  BackendResult measure(const Configuration& config, std::uint32_t samples) override;
  std::string describe() const override { return "table:" + ds_->device(); }

 private:
  const DeviceDataset* ds_;
};

// Deterministic function of the configuration with optional multiplicative
// Gaussian noise; noise draws come from one generator seeded at construction,
// so a given call sequence always yields the same values.
class SyntheticBackend final : public ObjectiveBackend {
 public:
  using Function = std::function<double(const Configuration&)>;
  SyntheticBackend(std::string name, Function fn, double noise = 0.0, std::uint64_t seed = 0);
  BackendResult measure(const Configuration& config, std::uint32_t samples) override;
  std::string describe() const override { return "synthetic:" + name_; }

 private:
  std::string name_;
  Function fn_;
  double noise_;
  Rng rng_;
};

// Runs an external executable per evaluation. Writes
//   {"parameters": {name: value, ...}, "samples": n}
// to its standard input and reads
//   {"objective_ms": float, "status": "ok" | ...}
// from its standard output. The reported objective is used as is; no timing
// happens on this side.
class CommandBackend final : public ObjectiveBackend {
 public:
  CommandBackend(std::vector<std::string> argv, const ParameterSpace& space,
                 std::chrono::milliseconds timeout = std::chrono::seconds(120));
  BackendResult measure(const Configuration& config, std::uint32_t samples) override;
  std::string describe() const override;

 private:
  std::vector<std::string> argv_;
  const ParameterSpace* space_;
  std::chrono::milliseconds timeout_;
};

struct SamplePolicy {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::fixed;
  std::uint32_t samples = 1;       // fixed mode
  std::uint32_t min_samples = 3;   // adaptive mode
  std::uint32_t max_samples = 30;  // adaptive mode
  double confidence = 0.95;        // adaptive mode

  static SamplePolicy fixed(std::uint32_t n);
  static SamplePolicy adaptive(std::uint32_t min_samples, std::uint32_t max_samples,
                               double confidence = 0.95);
};

// Two-sided standard normal quantile for the given confidence level.
double normal_critical_value(double confidence);

struct Evaluation {
  Status status = Status::ok;
  std::optional<double> objective;
  std::uint32_t samples_used = 0;
};

// Fixed mode: one backend call with policy.samples repetitions. Adaptive mode:
// single-sample calls; after min_samples, stop as soon as the normal
// confidence interval around the running mean lies entirely above or entirely
// below the incumbent (or has zero width), otherwise continue up to
// max_samples. Without an incumbent adaptive mode stops at min_samples.
Evaluation evaluate(ObjectiveBackend& backend, const Configuration& config,
                    const SamplePolicy& policy, std::optional<double> incumbent = std::nullopt);

struct TrajectoryStep {
  ConfigIndex index;
  Configuration config;
  Status status = Status::ok;
  std::optional<double> objective;
  std::optional<double> best;  // cumulative best after this step
  std::uint32_t samples_used = 0;
  std::string error;           // message when the backend raised
};

struct Trajectory {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t evaluations = 0;  // backend evaluations, including failures
  std::vector<TrajectoryStep> steps;

  std::optional<ConfigIndex> best_index() const;
  std::optional<double> best_objective() const;
};

// CSV "step,index,objective,best"; absent values are empty fields.
std::string trajectory_csv(const Trajectory& t);

struct RandomSearchOptions {
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  SamplePolicy policy{};
  // When false, failed evaluations are recorded but do not consume budget.
  bool invalid_consumes_budget = true;
};

// Uniform sampling of valid configurations without replacement. Every
// evaluation becomes one step; backend errors are recorded in the step.
Trajectory random_search(ObjectiveBackend& backend, const ParameterSpace& space,
                         const RandomSearchOptions& options);

struct LocalSearchOptions {
  std::optional<Configuration> start;  // drawn uniformly from valid configs when empty
  Neighborhood neighborhood = Neighborhood::adjacent1;
  std::uint64_t seed = 0;
  SamplePolicy policy{};
  std::size_t max_evaluations = 0;  // 0 = unlimited
};

// Randomized first-improvement descent: the neighbours of the current
// configuration are shuffled, the first strictly better valid one is taken,
// and the search ends at a configuration with no better neighbour. Steps list
// the accepted path (start first); evaluations counts every backend call.
// Throws the backend's error when the start itself cannot be evaluated.
Trajectory local_search(ObjectiveBackend& backend, const ParameterSpace& space,
                        const LocalSearchOptions& options);

// ---- synthetic landscapes ----

enum class LandscapeFunction { sphere, rastrigin_discrete, two_cluster, hotspot_like };

std::string_view to_string(LandscapeFunction f);
// Accepts "sphere", "rastrigin-discrete", "two-cluster", "hotspot-like".
LandscapeFunction parse_landscape_function(std::string_view name);

struct LandscapeSpec {
  std::vector<std::size_t> dims;  // parameter xi takes values 0..dims[i]-1
  LandscapeFunction function = LandscapeFunction::sphere;
  double noise = 0.0;  // sd of the multiplicative log-normal noise
  std::uint64_t seed = 0;
};

ParameterSpace synthetic_space(const LandscapeSpec& spec);

// Noise-free objective of a configuration of synthetic_space(spec).
double landscape_value(const LandscapeSpec& spec, std::span<const std::int64_t> values);

// Exhaustive all-ok dataset over synthetic_space(spec), device "synthetic".
// Throws TooLarge beyond 10^6 configurations.
DeviceDataset synthetic_landscape(const LandscapeSpec& spec);

}  // namespace tunescape

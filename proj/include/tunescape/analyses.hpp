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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tunescape/dataset.hpp"
#include "tunescape/surrogate.hpp"

namespace tunescape {

// optimum / objective for runtimes, in (0, 1] when objective >= optimum.
// Throws NonPositiveObjective.
double relative_performance(double objective, double optimum);

struct ConvergenceCurve {
  std::vector<double> values;  // values[b - 1] is the median at budget b
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  // Smallest budget whose median reaches 90%, 95% and 99% of the optimum.
  std::optional<std::size_t> budget_to_90;
  std::optional<std::size_t> budget_to_95;
  std::optional<std::size_t> budget_to_99;
};

// Random search without replacement over the valid records. Repetition r
// shuffles the valid records (index order) with a generator seeded seed + r.
// budget_cap = 0 means the number of valid records. Throws EmptyDataset.
ConvergenceCurve convergence(const DeviceDataset& ds, std::size_t repetitions, std::uint64_t seed,
                             std::size_t budget_cap = 0, unsigned jobs = 1);

// median_objective / best objective. Throws EmptyDataset.
double speedup_over_median(const DeviceDataset& ds);

struct PortabilityMatrix {
  std::vector<std::string> devices;
  // cells[a][b]: relative performance on device b of device a's optimum;
  // empty when that configuration has no valid measurement on b.
  std::vector<std::vector<std::optional<double>>> cells;
};

// Throws EmptyDataset when a device has no valid records.
PortabilityMatrix portability(const StudyDataset& study);

struct DistributionSummary {
  std::vector<double> speedups;  // median / objective, valid records in index order
  double median = 0.0;
  double low = 0.0;   // histogram range
  double high = 0.0;
  std::vector<std::size_t> histogram;
  std::vector<std::pair<double, double>> quantiles;  // (level, speedup)
};

inline constexpr double kDistributionQuantiles[] = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

// Per-config speedups over the median configuration, an equal-width histogram
// over [min, max] and speedup quantiles. The speedup at level q is the median
// divided by the objective quantile at 1 - q, so the 50% level is exactly 1.
DistributionSummary distribution(const DeviceDataset& ds, std::size_t bins);

struct SpaceAccounting {
  std::uint64_t cardinality = 0;
  std::uint64_t constrained = 0;
  std::optional<std::size_t> valid_min;
  std::optional<std::size_t> valid_max;
  std::uint64_t reduced = 0;
  std::uint64_t reduce_constrained = 0;
  std::optional<ParameterSpace> reduced_space;
};

// Anchors for the reduction are each device's best configuration.
SpaceAccounting space_accounting(const ParameterSpace& space,
                                 const std::vector<const DeviceDataset*>& datasets,
                                 const std::map<std::string, ImportanceMap>& importances,
                                 double threshold);

// ---- reports ----

struct AnalysisReport {
  std::string benchmark;
  std::vector<std::string> devices;
  std::string analysis;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json data = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json manifest = nlohmann::json::object();

  nlohmann::json to_json() const;
};

extern const char* const kToolVersion;

nlohmann::json to_json(const ConvergenceCurve& c);
nlohmann::json to_json(const PortabilityMatrix& m);
nlohmann::json to_json(const DistributionSummary& d);
nlohmann::json to_json(const SpaceAccounting& a);

// CSV emitters for plotting.
std::string convergence_csv(const ConvergenceCurve& c);
std::string portability_csv(const PortabilityMatrix& m);
std::string histogram_csv(const DistributionSummary& d);

}  // namespace tunescape

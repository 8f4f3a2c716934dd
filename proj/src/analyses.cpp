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

#include "tunescape/analyses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tunescape/error.hpp"
#include "tunescape/parallel.hpp"
#include "tunescape/random.hpp"
#include "tunescape/stats.hpp"

namespace tunescape {

const char* const kToolVersion = "tunescape 1.0.0";

double relative_performance(double objective, double optimum) {
  if (!(objective > 0.0) || !(optimum > 0.0))
    throw NonPositiveObjective("relative performance needs positive objectives");
  return optimum / objective;
}

namespace {

std::vector<double> valid_objectives(const DeviceDataset& ds) {
  std::vector<double> out;
  for (const auto& e : ds.entries())
    if (e.record.status == Status::ok) out.push_back(*e.record.objective);
  if (out.empty()) throw EmptyDataset("dataset '" + ds.device() + "' has no valid records");
  return out;
}

std::optional<std::size_t> first_reaching(const std::vector<double>& curve, double level) {
  for (std::size_t b = 0; b < curve.size(); ++b)
    if (curve[b] >= level) return b + 1;
  return std::nullopt;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

ConvergenceCurve convergence(const DeviceDataset& ds, std::size_t repetitions, std::uint64_t seed,
                             std::size_t budget_cap, unsigned jobs) {
  if (repetitions == 0) throw ValueError("convergence needs at least one repetition");
  const auto objectives = valid_objectives(ds);
  const double optimum = *std::min_element(objectives.begin(), objectives.end());
  const std::size_t cap =
      budget_cap == 0 ? objectives.size() : std::min(budget_cap, objectives.size());

  // Best-so-far is a step function; keep only its improvements per repetition.
  struct Step {
    std::size_t budget;
    double relative;
  };
  std::vector<std::vector<Step>> steps(repetitions);
  parallel_for(repetitions, jobs, [&](std::size_t r) {
    auto order = objectives;
    Rng rng = make_rng(seed + r);
    shuffle_prefix(std::span(order), cap, rng);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < cap; ++b) {
      if (order[b] < best) {
        best = order[b];
        steps[r].push_back({b + 1, relative_performance(best, optimum)});
      }
    }
  });

  ConvergenceCurve curve;
  curve.repetitions = repetitions;
  curve.seed = seed;
  curve.values.resize(cap);
  std::vector<std::size_t> cursor(repetitions, 0);
  std::vector<double> column(repetitions);
  for (std::size_t b = 1; b <= cap; ++b) {
    for (std::size_t r = 0; r < repetitions; ++r) {
      while (cursor[r] + 1 < steps[r].size() && steps[r][cursor[r] + 1].budget <= b) ++cursor[r];
      column[r] = steps[r][cursor[r]].relative;
    }
    curve.values[b - 1] = stats::median(column);
  }
  curve.budget_to_90 = first_reaching(curve.values, 0.90);
  curve.budget_to_95 = first_reaching(curve.values, 0.95);
  curve.budget_to_99 = first_reaching(curve.values, 0.99);
  return curve;
}

double speedup_over_median(const DeviceDataset& ds) {
  return median_objective(ds) / best(ds).objective;
}

PortabilityMatrix portability(const StudyDataset& study) {
  PortabilityMatrix m;
  std::vector<Measurement> optima;
  for (const auto& d : study.devices()) {
    m.devices.push_back(d.device());
    optima.push_back(best(d));
  }
  const auto& devices = study.devices();
  m.cells.assign(devices.size(), std::vector<std::optional<double>>(devices.size()));
  for (std::size_t a = 0; a < devices.size(); ++a) {
    for (std::size_t b = 0; b < devices.size(); ++b) {
      const TuningRecord* rec = devices[b].find(optima[a].index);
      if (!rec || rec->status != Status::ok) continue;
      m.cells[a][b] = relative_performance(*rec->objective, optima[b].objective);
    }
  }
  return m;
}

DistributionSummary distribution(const DeviceDataset& ds, std::size_t bins) {
  if (bins == 0) throw ValueError("distribution needs at least one bin");
  const auto objectives = valid_objectives(ds);
  DistributionSummary out;
  out.median = stats::median(objectives);
  out.speedups.reserve(objectives.size());
  for (const auto x : objectives) out.speedups.push_back(out.median / x);
  out.low = *std::min_element(out.speedups.begin(), out.speedups.end());
  out.high = *std::max_element(out.speedups.begin(), out.speedups.end());
  out.histogram.assign(bins, 0);
  const double width = (out.high - out.low) / static_cast<double>(bins);
  for (const auto s : out.speedups) {
    std::size_t bin = 0;
    if (width > 0.0) bin = static_cast<std::size_t>((s - out.low) / width);
    ++out.histogram[std::min(bin, bins - 1)];
  }
  for (const double q : kDistributionQuantiles)
    out.quantiles.emplace_back(q, out.median / stats::quantile(objectives, 1.0 - q));
  return out;
}

SpaceAccounting space_accounting(const ParameterSpace& space,
                                 const std::vector<const DeviceDataset*>& datasets,
                                 const std::map<std::string, ImportanceMap>& importances,
                                 double threshold) {
  SpaceAccounting out;
  out.cardinality = cardinality(space);
  out.constrained = constrained_cardinality(space);
  std::map<std::string, Configuration> anchors;
  for (const auto* ds : datasets) {
    const std::size_t valid = valid_subset(*ds).size();
    out.valid_min = out.valid_min ? std::min(*out.valid_min, valid) : valid;
    out.valid_max = out.valid_max ? std::max(*out.valid_max, valid) : valid;
    if (valid > 0) anchors[ds->device()] = best(*ds).config;
  }
  out.reduced_space = reduce_space(space, importances, threshold, anchors);
  out.reduced = cardinality(*out.reduced_space);
  out.reduce_constrained = constrained_cardinality(*out.reduced_space);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json AnalysisReport::to_json() const {
  return {{"benchmark", benchmark}, {"devices", devices},         {"analysis", analysis},
          {"params", params},       {"data", data},               {"seed", seed},
          {"tool_version", kToolVersion}, {"manifest", manifest}};
}

namespace {

nlohmann::json optional_json(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const ConvergenceCurve& c) {
  return {{"repetitions", c.repetitions},
          {"seed", c.seed},
          {"values", c.values},
          {"budget_to_90", optional_json(c.budget_to_90)},
          {"budget_to_95", optional_json(c.budget_to_95)},
          {"budget_to_99", optional_json(c.budget_to_99)}};
}

nlohmann::json to_json(const PortabilityMatrix& m) {
  nlohmann::json cells = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  for (std::size_t a = 0; a < m.cells.size(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < m.cells[a].size(); ++b) {
      if (m.cells[a][b]) {
        row.push_back(*m.cells[a][b]);
      } else {
        row.push_back(nullptr);
        missing.push_back({{"from", m.devices[a]}, {"to", m.devices[b]}});
      }
    }
    cells.push_back(std::move(row));
  }
  return {{"devices", m.devices}, {"cells", std::move(cells)}, {"missing", std::move(missing)}};
}

nlohmann::json to_json(const DistributionSummary& d) {
  nlohmann::json quantiles = nlohmann::json::array();
  for (const auto& [level, value] : d.quantiles)
    quantiles.push_back({{"level", level}, {"speedup", value}});
  return {{"median_objective", d.median},
          {"count", d.speedups.size()},
          {"histogram", {{"low", d.low}, {"high", d.high}, {"counts", d.histogram}}},
          {"quantiles", std::move(quantiles)},
          {"speedups", d.speedups}};
}

nlohmann::json to_json(const SpaceAccounting& a) {
  return {{"cardinality", a.cardinality},
          {"constrained", a.constrained},
          {"valid_min", optional_json(a.valid_min)},
          {"valid_max", optional_json(a.valid_max)},
          {"reduced", a.reduced},
          {"reduce_constrained", a.reduce_constrained},
          {"reduced_space", a.reduced_space ? space_to_json(*a.reduced_space) : nullptr}};
}

std::string convergence_csv(const ConvergenceCurve& c) {
  std::string out = "budget,median_relative_performance\n";
  for (std::size_t b = 0; b < c.values.size(); ++b)
    out += std::to_string(b + 1) + "," + fmt(c.values[b]) + "\n";
  return out;
}

std::string portability_csv(const PortabilityMatrix& m) {
  std::string out = "from";
  for (const auto& d : m.devices) out += "," + d;
  out += "\n";
  for (std::size_t a = 0; a < m.cells.size(); ++a) {
    out += m.devices[a];
    for (const auto& cell : m.cells[a]) out += "," + (cell ? fmt(*cell) : std::string());
    out += "\n";
  }
  return out;
}

std::string histogram_csv(const DistributionSummary& d) {
  std::string out = "bin_low,bin_high,count\n";
  const double width = (d.high - d.low) / static_cast<double>(d.histogram.size());
  for (std::size_t i = 0; i < d.histogram.size(); ++i) {
    const double lo = d.low + width * static_cast<double>(i);
    const double hi = i + 1 == d.histogram.size() ? d.high : lo + width;
    out += fmt(lo) + "," + fmt(hi) + "," + std::to_string(d.histogram[i]) + "\n";
  }
  return out;
}

}  // namespace tunescape

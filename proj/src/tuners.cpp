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

#include "tunescape/tuners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include "tunescape/error.hpp"

namespace tunescape {

BackendResult TableBackend::measure(const Configuration& config, std::uint32_t) {
  const TuningRecord* rec = ds_->find(config);
  if (!rec) throw InvalidConfig("configuration not measured on '" + ds_->device() + "'");
  return BackendResult{rec->status, rec->objective};
}

SyntheticBackend::SyntheticBackend(std::string name, Function fn, double noise, std::uint64_t seed)
    : name_(std::move(name)), fn_(std::move(fn)), noise_(noise), rng_(make_rng(seed)) {}

BackendResult SyntheticBackend::measure(const Configuration& config, std::uint32_t samples) {
  const double clean = fn_(config);
  if (!(clean > 0.0)) return BackendResult{Status::runtime_error, std::nullopt};
  if (noise_ == 0.0) return BackendResult{Status::ok, clean};
  const std::uint32_t n = std::max<std::uint32_t>(1, samples);
  double sum = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) sum += clean * std::exp(noise_ * standard_normal(rng_));
  return BackendResult{Status::ok, sum / n};
}

SamplePolicy SamplePolicy::fixed(std::uint32_t n) {
  SamplePolicy p;
  p.mode = Mode::fixed;
  p.samples = n;
  return p;
}

SamplePolicy SamplePolicy::adaptive(std::uint32_t min_samples, std::uint32_t max_samples,
                                    double confidence) {
  SamplePolicy p;
  p.mode = Mode::adaptive;
  p.min_samples = min_samples;
  p.max_samples = max_samples;
  p.confidence = confidence;
  return p;
}

double normal_critical_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw ValueError("confidence must be in (0, 1)");
  const double target = 1.0 - (1.0 - confidence) / 2.0;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

Evaluation evaluate(ObjectiveBackend& backend, const Configuration& config,
                    const SamplePolicy& policy, std::optional<double> incumbent) {
  if (policy.mode == SamplePolicy::Mode::fixed) {
    const std::uint32_t n = std::max<std::uint32_t>(1, policy.samples);
    const auto r = backend.measure(config, n);
    return Evaluation{r.status, r.objective, n};
  }
  if (policy.min_samples == 0 || policy.max_samples < policy.min_samples)
    throw ValueError("adaptive policy needs 1 <= min_samples <= max_samples");
  const double z = normal_critical_value(policy.confidence);
  // Welford running mean and variance.
  double mean = 0.0, m2 = 0.0;
  std::uint32_t k = 0;
  while (k < policy.max_samples) {
    const auto r = backend.measure(config, 1);
    ++k;
    if (r.status != Status::ok || !r.objective) return Evaluation{r.status, std::nullopt, k};
    const double delta = *r.objective - mean;
    mean += delta / k;
    m2 += delta * (*r.objective - mean);
    if (k < policy.min_samples) continue;
    if (!incumbent) break;
    const double sd = k > 1 ? std::sqrt(m2 / (k - 1)) : 0.0;
    const double half = z * sd / std::sqrt(static_cast<double>(k));
    if (half == 0.0 || mean - half > *incumbent || mean + half < *incumbent) break;
  }
  return Evaluation{Status::ok, mean, k};
}

std::optional<ConfigIndex> Trajectory::best_index() const {
  std::optional<ConfigIndex> out;
  std::optional<double> best;
  for (const auto& s : steps)
    if (s.objective && (!best || *s.objective < *best)) {
      best = s.objective;
      out = s.index;
    }
  return out;
}

std::optional<double> Trajectory::best_objective() const {
  if (steps.empty()) return std::nullopt;
  return steps.back().best;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step,index,objective,best\n";
  char buf[64];
  auto fmt = [&](const std::optional<double>& v) -> std::string {
    if (!v) return {};
    std::snprintf(buf, sizeof buf, "%.9g", *v);
    return buf;
  };
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out += std::to_string(i + 1) + "," + std::to_string(s.index.value) + "," + fmt(s.objective) +
           "," + fmt(s.best) + "\n";
  }
  return out;
}

namespace {

// Backend errors become recorded failures.
Evaluation guarded_evaluate(ObjectiveBackend& backend, const Configuration& config,
                            const SamplePolicy& policy, std::optional<double> incumbent,
                            std::string& error) {
  try {
    return evaluate(backend, config, policy, incumbent);
  } catch (const InvalidConfig& e) {
    error = e.what();
    return Evaluation{Status::invalid_config, std::nullopt, 0};
  } catch (const BackendTimeout& e) {
    error = e.what();
    return Evaluation{Status::timeout, std::nullopt, 0};
  } catch (const BackendFailure& e) {
    error = e.what();
    return Evaluation{Status::runtime_error, std::nullopt, 0};
  }
}

}  // namespace

Trajectory random_search(ObjectiveBackend& backend, const ParameterSpace& space,
                         const RandomSearchOptions& options) {
  if (options.budget == 0) throw ValueError("random search needs a budget of at least 1");
  Trajectory t;
  t.algorithm = "random";
  t.seed = options.seed;
  t.budget = options.budget;
  ValidSampler sampler(space, options.seed);
  std::optional<double> best;
  std::size_t consumed = 0;
  while (consumed < options.budget) {
    auto item = sampler.next();
    if (!item) break;
    TrajectoryStep step;
    step.index = item->first;
    step.config = std::move(item->second);
    const auto ev = guarded_evaluate(backend, step.config, options.policy, best, step.error);
    ++t.evaluations;
    step.status = ev.status;
    step.samples_used = ev.samples_used;
    if (ev.status == Status::ok && ev.objective) {
      step.objective = ev.objective;
      if (!best || *ev.objective < *best) best = ev.objective;
    }
    step.best = best;
    if (ev.status == Status::ok || options.invalid_consumes_budget) ++consumed;
    t.steps.push_back(std::move(step));
  }
  return t;
}

Trajectory local_search(ObjectiveBackend& backend, const ParameterSpace& space,
                        const LocalSearchOptions& options) {
  Trajectory t;
  t.algorithm = "localsearch";
  t.seed = options.seed;
  t.budget = options.max_evaluations;

  Configuration start;
  if (options.start) {
    if (!is_valid(space, *options.start))
      throw InvalidConfiguration("local search start is not a valid configuration");
    start = *options.start;
  } else {
    ValidSampler sampler(space, options.seed);
    auto item = sampler.next();
    if (!item) throw NotEnoughValidConfigs("space '" + space.name() + "' has no valid configuration");
    start = std::move(item->second);
  }
  Rng rng = make_rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  const ConstraintChecker checker(space);
  std::unordered_map<std::uint64_t, Evaluation> cache;

  const auto limit_reached = [&] {
    return options.max_evaluations != 0 && t.evaluations >= options.max_evaluations;
  };

  ConfigIndex current = encode(space, start);
  const auto first = evaluate(backend, start, options.policy);
  ++t.evaluations;
  cache.emplace(current.value, first);
  {
    TrajectoryStep step;
    step.index = current;
    step.config = start;
    step.status = first.status;
    step.samples_used = first.samples_used;
    step.objective = first.status == Status::ok ? first.objective : std::nullopt;
    step.best = step.objective;
    t.steps.push_back(std::move(step));
  }
  if (!t.steps.back().objective) return t;
  double current_value = *t.steps.back().objective;

  for (;;) {
    auto candidates = neighbors(space, current, options.neighborhood);
    shuffle(std::span(candidates), rng);
    bool moved = false;
    for (const auto nb : candidates) {
      if (limit_reached()) break;
      auto config = decode(space, nb);
      if (!checker(config.values)) continue;
      auto it = cache.find(nb.value);
      if (it == cache.end()) {
        std::string error;
        const auto ev = guarded_evaluate(backend, config, options.policy, current_value, error);
        ++t.evaluations;
        it = cache.emplace(nb.value, ev).first;
      }
      const Evaluation& ev = it->second;
      if (ev.status != Status::ok || !ev.objective || !(*ev.objective < current_value)) continue;
      current = nb;
      current_value = *ev.objective;
      TrajectoryStep step;
      step.index = nb;
      step.config = std::move(config);
      step.status = Status::ok;
      step.samples_used = ev.samples_used;
      step.objective = current_value;
      step.best = current_value;
      t.steps.push_back(std::move(step));
      moved = true;
      break;
    }
    if (!moved) break;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Synthetic landscapes

std::string_view to_string(LandscapeFunction f) {
  switch (f) {
    case LandscapeFunction::sphere: return "sphere";
    case LandscapeFunction::rastrigin_discrete: return "rastrigin-discrete";
    case LandscapeFunction::two_cluster: return "two-cluster";
    case LandscapeFunction::hotspot_like: return "hotspot-like";
  }
  return "unknown";
}

LandscapeFunction parse_landscape_function(std::string_view name) {
  for (auto f : {LandscapeFunction::sphere, LandscapeFunction::rastrigin_discrete,
                 LandscapeFunction::two_cluster, LandscapeFunction::hotspot_like})
    if (to_string(f) == name) return f;
  throw ValueError("unknown landscape function '" + std::string(name) + "'");
}

ParameterSpace synthetic_space(const LandscapeSpec& spec) {
  std::vector<Parameter> params;
  for (std::size_t i = 0; i < spec.dims.size(); ++i) {
    Parameter p{"x" + std::to_string(i), {}};
    for (std::size_t v = 0; v < spec.dims[i]; ++v) p.values.push_back(static_cast<std::int64_t>(v));
    params.push_back(std::move(p));
  }
  return ParameterSpace("synthetic-" + std::string(to_string(spec.function)), std::move(params));
}

double landscape_value(const LandscapeSpec& spec, std::span<const std::int64_t> values) {
  const std::size_t k = spec.dims.size();
  // Position of each coordinate scaled to [0, 1].
  auto unit = [&](std::size_t i) {
    return spec.dims[i] > 1 ? static_cast<double>(values[i]) / static_cast<double>(spec.dims[i] - 1)
                            : 0.5;
  };
  switch (spec.function) {
    case LandscapeFunction::sphere: {
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double c = static_cast<double>(spec.dims[i] - 1) / 2.0;
        const double d = static_cast<double>(values[i]) - c;
        sum += d * d;
      }
      return 1.0 + sum;
    }
    case LandscapeFunction::rastrigin_discrete: {
      double sum = 10.0 * static_cast<double>(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double z = -5.12 + 10.24 * unit(i);
        sum += z * z - 10.0 * std::cos(2.0 * std::numbers::pi * z);
      }
      return 1.0 + sum;
    }
    case LandscapeFunction::two_cluster: {
      double da = 0.0, db = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double u = unit(i);
        da += (u - 0.25) * (u - 0.25);
        db += (u - 0.75) * (u - 0.75);
      }
      return 1.0 + std::min(4.0 * da, 0.3 + 4.0 * db);
    }
    case LandscapeFunction::hotspot_like: {
      // A broad plateau around 10-15 ms with a small corner of ~1 ms
      // configurations.
      bool in_cluster = true;
      double spread = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double u = unit(i);
        if (u < 0.85) in_cluster = false;
        spread += u;
      }
      spread /= static_cast<double>(std::max<std::size_t>(k, 1));
      if (in_cluster) return 0.8 + 0.4 * (1.0 - spread);
      return 10.0 * (1.0 + 0.5 * spread);
    }
  }
  return 1.0;
}

DeviceDataset synthetic_landscape(const LandscapeSpec& spec) {
  if (spec.dims.empty()) throw ValueError("synthetic landscape needs at least one dimension");
  auto space = std::make_shared<const ParameterSpace>(synthetic_space(spec));
  if (space->cardinality() > 1'000'000)
    throw TooLarge("synthetic landscape with " + std::to_string(space->cardinality()) +
                   " configurations exceeds 10^6");
  Rng rng = make_rng(spec.seed);
  std::vector<TuningRecord> records;
  records.reserve(space->cardinality());
  for_each_valid(*space, [&](ConfigIndex, const Configuration& config) {
    double value = landscape_value(spec, config.values);
    if (spec.noise > 0.0) value *= std::exp(spec.noise * standard_normal(rng));
    records.push_back(TuningRecord{config, value, Status::ok});
  });
  return DeviceDataset("synthetic", std::move(space), std::move(records));
}

}  // namespace tunescape

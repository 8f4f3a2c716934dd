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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "tunescape/analyses.hpp"
#include "tunescape/error.hpp"
#include "tunescape/landscape.hpp"
#include "tunescape/stats.hpp"
#include "tunescape/tuners.hpp"

namespace tunescape {
namespace {

const std::string kFakeKernel = std::string(TUNESCAPE_TEST_DATA) + "/fake_kernel.py";

SyntheticBackend constant_backend(double value, double noise = 0.0, std::uint64_t seed = 0) {
  return SyntheticBackend("const", [value](const Configuration&) { return value; }, noise, seed);
}

// Counts backend calls.
class CountingBackend final : public ObjectiveBackend {
 public:
  explicit CountingBackend(ObjectiveBackend& inner) : inner_(&inner) {}
  BackendResult measure(const Configuration& c, std::uint32_t samples) override {
    ++calls;
    return inner_->measure(c, samples);
  }
  std::string describe() const override { return "counting"; }
  std::size_t calls = 0;

 private:
  ObjectiveBackend* inner_;
};

TEST(Policy, CriticalValues) {
  EXPECT_NEAR(normal_critical_value(0.95), 1.959963984540054, 1e-9);
  EXPECT_NEAR(normal_critical_value(0.99), 2.5758293035489, 1e-9);
  EXPECT_THROW(normal_critical_value(1.0), ValueError);
}

TEST(Policy, ZeroVarianceStopsAtMinSamples) {
  auto backend = constant_backend(2.0);
  const auto ev = evaluate(backend, Configuration{{0}}, SamplePolicy::adaptive(4, 30), 1.0);
  EXPECT_EQ(ev.samples_used, 4u);
  EXPECT_DOUBLE_EQ(*ev.objective, 2.0);
}

TEST(Policy, ClearlyWorseConfigTerminatesEarly) {
  auto backend = constant_backend(5.0, 0.02, 17);
  const auto ev = evaluate(backend, Configuration{{0}}, SamplePolicy::adaptive(3, 30), 1.0);
  EXPECT_LT(ev.samples_used, 30u);
  EXPECT_NEAR(*ev.objective, 5.0, 0.2);
}

TEST(Policy, CloseCallRunsToMaximum) {
  auto backend = constant_backend(1.0, 0.3, 5);
  const auto ev = evaluate(backend, Configuration{{0}}, SamplePolicy::adaptive(3, 12), 1.0);
  EXPECT_EQ(ev.samples_used, 12u);
}

TEST(Policy, FixedModeMakesOneCall) {
  auto inner = constant_backend(3.0, 0.1, 2);
  CountingBackend backend(inner);
  const auto ev = evaluate(backend, Configuration{{0}}, SamplePolicy::fixed(5));
  EXPECT_EQ(backend.calls, 1u);
  EXPECT_EQ(ev.samples_used, 5u);
}

TEST(TableBackend, UnmeasuredConfigIsRejected) {
  const auto ds = synthetic_landscape({{4}, LandscapeFunction::sphere, 0.0, 0});
  const auto space = std::make_shared<const ParameterSpace>(synthetic_space({{5}}));
  TableBackend backend(ds);
  EXPECT_DOUBLE_EQ(*backend.measure(Configuration{{1}}, 1).objective, 1.25);
  EXPECT_THROW(backend.measure(Configuration{{7}}, 1), InvalidConfig);
}

TEST(RandomSearch, ExhaustionFindsGlobalBest) {
  const LandscapeSpec spec{{6, 5}, LandscapeFunction::rastrigin_discrete, 0.1, 9};
  const auto ds = synthetic_landscape(spec);
  TableBackend backend(ds);
  const auto t = random_search(backend, ds.space(), {ds.size(), 4, {}, true});
  EXPECT_EQ(t.steps.size(), ds.size());
  EXPECT_EQ(*t.best_index(), best(ds).index);
  EXPECT_DOUBLE_EQ(*t.best_objective(), best(ds).objective);
  // Without replacement: every index appears once.
  std::vector<std::uint64_t> seen;
  for (const auto& s : t.steps) seen.push_back(s.index.value);
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
}

TEST(RandomSearch, SameSeedSameTrajectory) {
  const auto ds = synthetic_landscape({{8, 8}, LandscapeFunction::two_cluster, 0.05, 1});
  TableBackend backend(ds);
  const auto a = random_search(backend, ds.space(), {25, 11, {}, true});
  const auto b = random_search(backend, ds.space(), {25, 11, {}, true});
  EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
  const auto c = random_search(backend, ds.space(), {25, 12, {}, true});
  EXPECT_NE(trajectory_csv(a), trajectory_csv(c));
  for (std::size_t i = 1; i < a.steps.size(); ++i) EXPECT_LE(*a.steps[i].best, *a.steps[i - 1].best);
}

TEST(RandomSearch, FailuresAreRecordedAndBudgetPolicyApplies) {
  // Odd x fail.
  SyntheticBackend backend("odd", [](const Configuration& c) {
    return c.values[0] % 2 ? -1.0 : 1.0 + static_cast<double>(c.values[0]);
  });
  const auto space = synthetic_space({{10}});
  const auto consumed = random_search(backend, space, {6, 3, {}, true});
  EXPECT_EQ(consumed.steps.size(), 6u);
  const auto free = random_search(backend, space, {4, 3, {}, false});
  const auto ok = std::count_if(free.steps.begin(), free.steps.end(),
                                [](const auto& s) { return s.status == Status::ok; });
  EXPECT_EQ(ok, 4);
  EXPECT_EQ(free.evaluations, free.steps.size());
  EXPECT_THROW(random_search(backend, space, {0, 3, {}, true}), ValueError);
}

TEST(RandomSearch, MissingTableEntriesBecomeInvalidSteps) {
  const auto full = synthetic_landscape({{6}, LandscapeFunction::sphere, 0.0, 0});
  std::vector<TuningRecord> some;
  for (const auto& e : full.entries())
    if (e.index.value % 2 == 0) some.push_back(e.record);
  const DeviceDataset ds("partial", full.space_ptr(), some);
  TableBackend backend(ds);
  const auto t = random_search(backend, ds.space(), {6, 1, {}, true});
  const auto invalid = std::count_if(t.steps.begin(), t.steps.end(), [](const auto& s) {
    return s.status == Status::invalid_config && !s.error.empty();
  });
  EXPECT_EQ(invalid, 3);
}

TEST(RandomSearch, MedianTrajectoryMatchesConvergence) {
  const auto ds = synthetic_landscape({{7, 6, 5}, LandscapeFunction::rastrigin_discrete, 0.2, 4});
  TableBackend backend(ds);
  const std::size_t reps = 100, budget = 60;
  const std::uint64_t seed = 1000;
  const double optimum = best(ds).objective;
  std::vector<std::vector<double>> rel(budget);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t = random_search(backend, ds.space(), {budget, seed + r, {}, true});
    for (std::size_t b = 0; b < budget; ++b) rel[b].push_back(optimum / *t.steps[b].best);
  }
  const auto curve = convergence(ds, reps, seed, budget);
  ASSERT_EQ(curve.values.size(), budget);
  for (std::size_t b = 0; b < budget; ++b) EXPECT_DOUBLE_EQ(curve.values[b], stats::median(rel[b]));
}

TEST(LocalSearch, StartingAtOptimumStopsImmediately) {
  const auto ds = synthetic_landscape({{9, 9}, LandscapeFunction::sphere, 0.0, 0});
  TableBackend backend(ds);
  const auto t = local_search(backend, ds.space(), {best(ds).config, Neighborhood::adjacent1, 2});
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].index, best(ds).index);
  EXPECT_EQ(t.evaluations, 1u + 4u);
}

TEST(LocalSearch, ChainWalksToSink) {
  const auto ds = synthetic_landscape({{8}, LandscapeFunction::sphere, 0.0, 0});
  // Values (x - 3.5)^2 + 1: decreasing from x = 0 to x = 3.
  TableBackend backend(ds);
  const auto t = local_search(backend, ds.space(), {Configuration{{0}}, Neighborhood::adjacent1, 0});
  std::vector<std::uint64_t> path;
  for (const auto& s : t.steps) path.push_back(s.index.value);
  EXPECT_EQ(path, (std::vector<std::uint64_t>{0, 1, 2, 3}));
  for (std::size_t i = 1; i < t.steps.size(); ++i)
    EXPECT_LT(*t.steps[i].objective, *t.steps[i - 1].objective);
}

TEST(LocalSearch, TerminalsAreSinks) {
  const auto ds = synthetic_landscape({{10, 10}, LandscapeFunction::rastrigin_discrete, 0.1, 8});
  const auto g = build_ffg(ds, Neighborhood::hamming1);
  const auto sinks = g.sinks();
  TableBackend backend(ds);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = local_search(backend, ds.space(), {std::nullopt, Neighborhood::hamming1, seed});
    const auto node = g.find(t.steps.back().index);
    EXPECT_TRUE(std::binary_search(sinks.begin(), sinks.end(), node)) << "seed " << seed;
  }
}

TEST(LocalSearch, ArrivalFrequenciesAgreeWithWalks) {
  const auto ds = synthetic_landscape({{12, 12}, LandscapeFunction::two_cluster, 0.08, 6});
  const auto expected = arrival_frequencies(ds, Neighborhood::adjacent1, 100000, 3, 4);
  TableBackend backend(ds);
  std::map<std::uint64_t, double> counts;
  const std::size_t runs = 10000;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    const auto t = local_search(backend, ds.space(), {std::nullopt, Neighborhood::adjacent1, seed});
    counts[t.steps.back().index.value] += 1.0 / static_cast<double>(runs);
  }
  ASSERT_GE(expected.size(), 2u);
  for (const auto& m : expected) EXPECT_NEAR(counts[m.minimum.value], m.frequency, 0.01);
}

TEST(LocalSearch, EvaluationCapAndBadStart) {
  const auto ds = synthetic_landscape({{20, 20}, LandscapeFunction::sphere, 0.0, 0});
  TableBackend backend(ds);
  const auto t =
      local_search(backend, ds.space(), {Configuration{{0, 0}}, Neighborhood::hamming1, 1, {}, 5});
  EXPECT_LE(t.evaluations, 5u);
  EXPECT_THROW(local_search(backend, ds.space(), {Configuration{{99, 0}}, Neighborhood::adjacent1, 1}),
               InvalidConfiguration);
}

TEST(Synthetic, GeneratorProperties) {
  const LandscapeSpec spec{{10, 10}, LandscapeFunction::two_cluster, 0.0, 0};
  const auto ds = synthetic_landscape(spec);
  EXPECT_EQ(ds.size(), 100u);
  EXPECT_GE(build_ffg(ds).sinks().size(), 2u);
  const auto noisy = synthetic_landscape({{10, 10}, LandscapeFunction::two_cluster, 0.1, 3});
  EXPECT_EQ(export_text(noisy, DataFormat::csv),
            export_text(synthetic_landscape({{10, 10}, LandscapeFunction::two_cluster, 0.1, 3}),
                        DataFormat::csv));
  EXPECT_THROW(synthetic_landscape({{1000, 1001}, LandscapeFunction::sphere, 0.0, 0}), TooLarge);
  EXPECT_EQ(parse_landscape_function("hotspot-like"), LandscapeFunction::hotspot_like);
  EXPECT_THROW(parse_landscape_function("ackley"), ValueError);
}

TEST(Synthetic, HotspotLikeHasLargeSpeedup) {
  const auto ds = synthetic_landscape({{20, 20, 20}, LandscapeFunction::hotspot_like, 0.05, 2});
  EXPECT_GT(speedup_over_median(ds), 10.0);
}

TEST(CommandBackend, ReportsObjective) {
  const ParameterSpace space("cmd", {{"a", {1, 2, 3}}, {"b", {10, 20}}});
  CommandBackend backend({kFakeKernel}, space);
  const auto r = backend.measure(Configuration{{2, 20}}, 3);
  EXPECT_EQ(r.status, Status::ok);
  EXPECT_DOUBLE_EQ(*r.objective, 23.0);
  EXPECT_NE(backend.describe().find("fake_kernel.py"), std::string::npos);
}

TEST(CommandBackend, FailureModes) {
  const ParameterSpace space("cmd", {{"a", {1, 2, 3}}});
  const Configuration c{{1}};
  EXPECT_THROW(CommandBackend({kFakeKernel, "crash"}, space).measure(c, 1), BackendFailure);
  EXPECT_THROW(CommandBackend({kFakeKernel, "garbage"}, space).measure(c, 1), BackendFailure);
  EXPECT_THROW(CommandBackend({kFakeKernel, "sleep"}, space, std::chrono::milliseconds(300))
                   .measure(c, 1),
               BackendTimeout);
  EXPECT_THROW(CommandBackend({"/nonexistent/executable"}, space).measure(c, 1), BackendFailure);
  const auto rejected = CommandBackend({kFakeKernel, "reject"}, space).measure(c, 1);
  EXPECT_EQ(rejected.status, Status::compile_error);
  EXPECT_FALSE(rejected.objective.has_value());
}

TEST(CommandBackend, DrivesRandomSearch) {
  const ParameterSpace space("cmd", {{"a", {1, 2, 3}}, {"b", {10, 20}}});
  CommandBackend backend({kFakeKernel}, space);
  const auto t = random_search(backend, space, {6, 0, {}, true});
  EXPECT_DOUBLE_EQ(*t.best_objective(), 12.0);
}

TEST(Trajectory, CsvFormat) {
  Trajectory t;
  t.steps.push_back({ConfigIndex{4}, {}, Status::ok, 2.5, 2.5, 1, ""});
  t.steps.push_back({ConfigIndex{2}, {}, Status::timeout, std::nullopt, 2.5, 0, "slow"});
  EXPECT_EQ(trajectory_csv(t), "step,index,objective,best\n1,4,2.5,2.5\n2,2,,2.5\n");
}

}  // namespace
}  // namespace tunescape

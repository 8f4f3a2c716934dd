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

#include <random>

#include "tunescape/dataset.hpp"
#include "tunescape/error.hpp"

namespace tunescape {
namespace {

SpacePtr line_space(std::int64_t n) {
  std::vector<std::int64_t> values;
  for (std::int64_t i = 0; i < n; ++i) values.push_back(i);
  return std::make_shared<const ParameterSpace>("line", std::vector<Parameter>{{"x", values}});
}

DeviceDataset line_dataset(const std::vector<std::optional<double>>& objectives) {
  std::vector<TuningRecord> records;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const bool ok = objectives[i].has_value();
    records.push_back({Configuration{{static_cast<std::int64_t>(i)}}, objectives[i],
                       ok ? Status::ok : Status::runtime_error});
  }
  return DeviceDataset("dev", line_space(static_cast<std::int64_t>(objectives.size())),
                       std::move(records));
}

const char* kGemmHeader = "MWG,NWG,MDIMC,NDIMC,MDIMA,NDIMB,VWM,VWN,SA,SB,objective_ms,status\n";

TEST(Ingest, ThreeDistinctRows) {
  const auto space = std::make_shared<const ParameterSpace>(builtin_space("gemm"));
  const std::string csv = std::string(kGemmHeader) +
                          "16,16,8,8,8,8,1,1,0,0,1.5,ok\n"
                          "32,16,8,8,8,8,1,1,0,0,2.5,ok\n"
                          "16,16,8,8,8,8,1,1,0,1,,compile_error\n";
  const auto ds = ingest_text(csv, DataFormat::csv, space, {"RTX 3090"});
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.duplicate_count(), 0u);
  EXPECT_EQ(ds.device(), "RTX 3090");
  EXPECT_EQ(valid_subset(ds).size(), 2u);
}

TEST(Ingest, OutOfDomainValueNamesRowAndParameter) {
  const auto space = std::make_shared<const ParameterSpace>(builtin_space("gemm"));
  const std::string csv = std::string(kGemmHeader) +
                          "16,16,8,8,8,8,1,1,0,0,1.5,ok\n"
                          "33,16,8,8,8,8,1,1,0,0,2.5,ok\n";
  try {
    ingest_text(csv, DataFormat::csv, space, {"dev"});
    FAIL() << "expected ValueError";
  } catch (const ValueError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("MWG"), std::string::npos) << msg;
  }
}

TEST(Ingest, DuplicatesKeepFirst) {
  const auto space = line_space(4);
  const std::string csv =
      "x,objective_ms,status\n"
      "0,5,ok\n"
      "1,4,ok\n"
      "0,1,ok\n"
      "2,3,ok\n"
      "1,9,ok\n"
      "0,2,ok\n";
  const auto ds = ingest_text(csv, DataFormat::csv, space, {"dev"});
  // Three unique configurations (0, 1, 2); rows 4, 6 and 7 repeat earlier ones.
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.duplicate_count(), 3u);
  EXPECT_DOUBLE_EQ(*ds.find(ConfigIndex{0})->objective, 5.0);
  EXPECT_DOUBLE_EQ(*ds.find(ConfigIndex{1})->objective, 4.0);

  const auto min = ingest_text(csv, DataFormat::csv, space, {"dev", DuplicatePolicy::keep_min});
  EXPECT_EQ(min.duplicate_count(), 3u);
  EXPECT_DOUBLE_EQ(*min.find(ConfigIndex{0})->objective, 1.0);
  EXPECT_DOUBLE_EQ(*min.find(ConfigIndex{1})->objective, 4.0);
}

TEST(Ingest, SchemaAndValueErrors) {
  const auto space = line_space(4);
  EXPECT_THROW(ingest_text("x,status\n0,ok\n", DataFormat::csv, space, {}), SchemaError);
  EXPECT_THROW(ingest_text("x,objective_ms,status\n0,,ok\n", DataFormat::csv, space, {}),
               ValueError);
  EXPECT_THROW(ingest_text("x,objective_ms,status\n0,-1,ok\n", DataFormat::csv, space, {}),
               ValueError);
  EXPECT_THROW(ingest_text("x,objective_ms,status\n0,1,maybe\n", DataFormat::csv, space, {}),
               ValueError);
  EXPECT_THROW(ingest_text("x,objective_ms,status\n0.5,1,ok\n", DataFormat::csv, space, {}),
               ValueError);
  EXPECT_THROW(ingest("/nonexistent/file.csv", DataFormat::csv, space), IoError);
}

TEST(Ingest, JsonLines) {
  const auto space = line_space(4);
  const std::string text =
      "{\"x\":2,\"objective_ms\":1.25,\"status\":\"ok\"}\n"
      "{\"x\":0,\"objective_ms\":null,\"status\":\"timeout\"}\n"
      "\n"
      "{\"x\":1,\"status\":\"compile_error\"}\n";
  const auto ds = ingest_text(text, DataFormat::jsonl, space, {"dev"});
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.entries()[0].record.status, Status::timeout);
  EXPECT_EQ(valid_subset(ds).size(), 1u);
  EXPECT_THROW(ingest_text("{\"x\":9,\"objective_ms\":1,\"status\":\"ok\"}\n", DataFormat::jsonl,
                           space, {}),
               ValueError);
  EXPECT_THROW(ingest_text("{\"objective_ms\":1,\"status\":\"ok\"}\n", DataFormat::jsonl, space, {}),
               SchemaError);
}

TEST(ValidSubset, DropsFailures) {
  EXPECT_EQ(valid_subset(line_dataset({1.0, std::nullopt, 2.0, std::nullopt, 3.0})).size(), 3u);
  EXPECT_TRUE(valid_subset(line_dataset({std::nullopt, std::nullopt})).empty());
}

TEST(BestAndMedian, OddCount) {
  const auto ds = line_dataset({3.0, 5.0, 1.0, 4.0, 2.0});
  EXPECT_DOUBLE_EQ(best(ds).objective, 1.0);
  EXPECT_EQ(best(ds).index.value, 2u);
  EXPECT_DOUBLE_EQ(median_objective(ds), 3.0);
}

TEST(BestAndMedian, TieGoesToLowestIndex) {
  const auto ds = line_dataset({2.0, 1.0, 4.0, 1.0});
  EXPECT_EQ(best(ds).index.value, 1u);
}

TEST(BestAndMedian, EvenCountAveragesCentralValues) {
  EXPECT_DOUBLE_EQ(median_objective(line_dataset({4.0, 1.0, 3.0, 2.0})), 2.5);
}

TEST(BestAndMedian, EmptyDataset) {
  const auto ds = line_dataset({std::nullopt});
  EXPECT_THROW(best(ds), EmptyDataset);
  EXPECT_THROW(median_objective(ds), EmptyDataset);
}

TEST(Export, RoundTripIsStable) {
  const auto space = std::make_shared<const ParameterSpace>(builtin_space("nbody"));
  std::mt19937_64 rng(3);
  std::vector<TuningRecord> records;
  for (const auto& c : sample_valid(*space, 300, 17)) {
    const bool ok = rng() % 5 != 0;
    const double value = 0.1 + static_cast<double>(rng() % 1000000) / 7919.0;
    records.push_back({c, ok ? std::optional<double>(value) : std::nullopt,
                       ok ? Status::ok : Status::compile_error});
  }
  const DeviceDataset ds("dev", space, records);
  for (const auto format : {DataFormat::csv, DataFormat::jsonl}) {
    const auto first = export_text(ds, format);
    const auto again = ingest_text(first, format, space, {"dev"});
    EXPECT_EQ(export_text(again, format), first);
    EXPECT_EQ(again.size(), ds.size());
  }
  // CSV and JSON-lines agree on the records they carry.
  const auto via_csv = ingest_text(export_text(ds, DataFormat::csv), DataFormat::csv, space, {"d"});
  const auto via_jsonl =
      ingest_text(export_text(ds, DataFormat::jsonl), DataFormat::jsonl, space, {"d"});
  EXPECT_EQ(export_text(via_csv, DataFormat::csv), export_text(via_jsonl, DataFormat::csv));
}

TEST(Export, NineSignificantDigits) {
  const auto ds = line_dataset({1.0 / 3.0, std::nullopt});
  EXPECT_EQ(export_text(ds, DataFormat::csv),
            "x,objective_ms,status\n0,0.333333333,ok\n1,,runtime_error\n");
  EXPECT_EQ(export_text(ds, DataFormat::jsonl),
            "{\"x\":0,\"objective_ms\":0.333333333,\"status\":\"ok\"}\n"
            "{\"x\":1,\"objective_ms\":null,\"status\":\"runtime_error\"}\n");
}

TEST(Study, RequiresSharedSpace) {
  StudyDataset study("line");
  study.add(line_dataset({1.0, 2.0}));
  EXPECT_THROW(study.add(line_dataset({1.0, 2.0})), SchemaError);  // same device name
  auto other = DeviceDataset("other", line_space(3),
                             {TuningRecord{Configuration{{0}}, 1.0, Status::ok}});
  EXPECT_THROW(study.add(std::move(other)), SchemaError);
}

}  // namespace
}  // namespace tunescape

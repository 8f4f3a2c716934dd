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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tunescape/space.hpp"

namespace tunescape {

enum class Status { ok, compile_error, runtime_error, invalid_config, timeout };

std::string_view to_string(Status status);
// Throws ValueError for unknown names.
Status parse_status(std::string_view name);

// Objective is a runtime in milliseconds. status == ok iff the objective is
// present and positive.
struct TuningRecord {
  Configuration config;
  std::optional<double> objective;
  Status status = Status::ok;
};

enum class DataFormat { csv, jsonl };

// Throws ValueError for names other than "csv" and "jsonl".
DataFormat parse_data_format(std::string_view name);

enum class DuplicatePolicy { keep_first, keep_min };

// Measurements of one device over one space, keyed and ordered by ConfigIndex.
// Immutable once built.
class DeviceDataset {
 public:
  struct Entry {
    ConfigIndex index;
    TuningRecord record;
  };

  // Records must be domain-valid for the space (InvalidConfiguration
  // otherwise) and satisfy the status/objective invariant (ValueError).
  // Duplicates are resolved per policy and counted.
  DeviceDataset(std::string device, SpacePtr space, std::vector<TuningRecord> records,
                DuplicatePolicy policy = DuplicatePolicy::keep_first);

  const std::string& device() const noexcept { return device_; }
  const ParameterSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t duplicate_count() const noexcept { return duplicates_; }

  const TuningRecord* find(ConfigIndex index) const;
  const TuningRecord* find(const Configuration& config) const;

 private:
  std::string device_;
  SpacePtr space_;
  std::vector<Entry> entries_;
  std::size_t duplicates_ = 0;
};

struct Measurement {
  ConfigIndex index;
  Configuration config;
  double objective;
};

// Records with status ok, in index order.
std::vector<Measurement> valid_subset(const DeviceDataset& ds);

// Strict minimum objective, ties broken by lowest index. Throws EmptyDataset.
Measurement best(const DeviceDataset& ds);

// Median of valid objectives (mean of the two central values for even
// counts). Throws EmptyDataset.
double median_objective(const DeviceDataset& ds);

struct IngestOptions {
  std::string device;  // defaults to the file stem when empty
  DuplicatePolicy duplicates = DuplicatePolicy::keep_first;
};

// Reads a CSV (header: parameter names, objective_ms, status) or JSON-lines
// file. Throws SchemaError, ValueError (message names row and parameter) or
// IoError.
DeviceDataset ingest(const std::string& path, DataFormat format, SpacePtr space,
                     const IngestOptions& options = {});
DeviceDataset ingest_text(std::string_view text, DataFormat format, SpacePtr space,
                          const IngestOptions& options);

// Deterministic text export, records in index order, objectives with 9
// significant digits.
std::string export_text(const DeviceDataset& ds, DataFormat format);
void export_file(const DeviceDataset& ds, DataFormat format, const std::string& path);

// Format with 9 significant digits ("%.9g").
std::string format_objective(double value);

// Devices measured on one shared space, in insertion order.
class StudyDataset {
 public:
  explicit StudyDataset(std::string benchmark) : benchmark_(std::move(benchmark)) {}

  // Throws SchemaError when the dataset's space differs from the study's or
  // the device name is already present.
  void add(DeviceDataset ds);

  const std::string& benchmark() const noexcept { return benchmark_; }
  const std::vector<DeviceDataset>& devices() const noexcept { return devices_; }
  const DeviceDataset* device(std::string_view name) const;

 private:
  std::string benchmark_;
  std::vector<DeviceDataset> devices_;
};

}  // namespace tunescape

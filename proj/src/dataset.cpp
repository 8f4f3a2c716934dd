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

#include "tunescape/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tunescape/error.hpp"
#include "tunescape/stats.hpp"

namespace tunescape {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::ok: return "ok";
    case Status::compile_error: return "compile_error";
    case Status::runtime_error: return "runtime_error";
    case Status::invalid_config: return "invalid_config";
    case Status::timeout: return "timeout";
  }
  return "unknown";
}

Status parse_status(std::string_view name) {
  for (auto s : {Status::ok, Status::compile_error, Status::runtime_error, Status::invalid_config,
                 Status::timeout})
    if (to_string(s) == name) return s;
  throw ValueError("unknown status '" + std::string(name) + "'");
}

DataFormat parse_data_format(std::string_view name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "jsonl") return DataFormat::jsonl;
  throw ValueError("unknown data format '" + std::string(name) + "'");
}

namespace {

void check_record(const TuningRecord& r) {
  const bool has_positive = r.objective && std::isfinite(*r.objective) && *r.objective > 0.0;
  if (r.status == Status::ok && !has_positive)
    throw ValueError("record with status ok needs a positive objective");
  if (r.status != Status::ok && r.objective)
    throw ValueError("record with status " + std::string(to_string(r.status)) +
                     " must not carry an objective");
}

bool better(const TuningRecord& a, const TuningRecord& b) {
  if (a.status == Status::ok && b.status != Status::ok) return true;
  if (a.status != Status::ok || b.status != Status::ok) return false;
  return *a.objective < *b.objective;
}

}  // namespace

DeviceDataset::DeviceDataset(std::string device, SpacePtr space,
                             std::vector<TuningRecord> records, DuplicatePolicy policy)
    : device_(std::move(device)), space_(std::move(space)) {
  if (!space_) throw SchemaError("dataset without a space");
  std::vector<Entry> all;
  all.reserve(records.size());
  for (auto& r : records) {
    check_record(r);
    const ConfigIndex index = encode(*space_, r.config);
    all.push_back(Entry{index, std::move(r)});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Entry& a, const Entry& b) { return a.index < b.index; });
  entries_.reserve(all.size());
  for (auto& e : all) {
    if (!entries_.empty() && entries_.back().index == e.index) {
      ++duplicates_;
      if (policy == DuplicatePolicy::keep_min && better(e.record, entries_.back().record))
        entries_.back().record = std::move(e.record);
      continue;
    }
    entries_.push_back(std::move(e));
  }
}

const TuningRecord* DeviceDataset::find(ConfigIndex index) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, ConfigIndex i) { return e.index < i; });
  if (it == entries_.end() || it->index != index) return nullptr;
  return &it->record;
}

const TuningRecord* DeviceDataset::find(const Configuration& config) const {
  if (!is_domain_valid(*space_, config)) return nullptr;
  return find(encode(*space_, config));
}

std::vector<Measurement> valid_subset(const DeviceDataset& ds) {
  std::vector<Measurement> out;
  for (const auto& e : ds.entries())
    if (e.record.status == Status::ok) out.push_back({e.index, e.record.config, *e.record.objective});
  return out;
}

Measurement best(const DeviceDataset& ds) {
  const Measurement* winner = nullptr;
  const auto valid = valid_subset(ds);
  for (const auto& m : valid)
    if (!winner || m.objective < winner->objective) winner = &m;
  if (!winner) throw EmptyDataset("dataset '" + ds.device() + "' has no valid records");
  return *winner;
}

double median_objective(const DeviceDataset& ds) {
  std::vector<double> objectives;
  for (const auto& e : ds.entries())
    if (e.record.status == Status::ok) objectives.push_back(*e.record.objective);
  if (objectives.empty()) throw EmptyDataset("dataset '" + ds.device() + "' has no valid records");
  return stats::median(objectives);
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

std::int64_t parse_int(std::string_view text, std::size_t row, const std::string& column) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ValueError(row_label(row) + ", parameter '" + column + "': '" + std::string(text) +
                     "' is not an integer");
  return value;
}

std::optional<double> parse_objective(std::string_view text, std::size_t row) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ValueError(row_label(row) + ": objective_ms '" + std::string(text) +
                     "' is not a number");
  return value;
}

// Checks domain membership and the status/objective invariant with row
// context, so errors surface as ValueError naming the row.
TuningRecord make_record(const ParameterSpace& space, std::vector<std::int64_t> values,
                         std::optional<double> objective, Status status, std::size_t row) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!space.ordinal(i, values[i]))
      throw ValueError(row_label(row) + ", parameter '" + space.parameter_names()[i] +
                       "': value " + std::to_string(values[i]) + " is not in the domain");
  if (status == Status::ok && !(objective && std::isfinite(*objective) && *objective > 0.0))
    throw ValueError(row_label(row) + ": status ok requires a positive objective_ms");
  // Failed runs keep no objective even if the file reports one.
  if (status != Status::ok) objective.reset();
  return TuningRecord{Configuration{std::move(values)}, objective, status};
}

std::vector<TuningRecord> read_csv(std::string_view text, const ParameterSpace& space) {
  std::vector<TuningRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::size_t> param_cols;
  std::size_t objective_col = 0, status_col = 0, width = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                   : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(raw).empty()) continue;
    const auto fields = split_csv(raw);
    if (!have_header) {
      auto column_of = [&](std::string_view name) {
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (fields[i] == name) return i;
        throw SchemaError("CSV header lacks column '" + std::string(name) + "'");
      };
      for (const auto& name : space.parameter_names()) param_cols.push_back(column_of(name));
      objective_col = column_of("objective_ms");
      status_col = column_of("status");
      width = fields.size();
      have_header = true;
      continue;
    }
    const std::size_t row = line_no;
    if (fields.size() != width)
      throw SchemaError(row_label(row) + ": expected " + std::to_string(width) + " fields, got " +
                        std::to_string(fields.size()));
    std::vector<std::int64_t> values(param_cols.size());
    for (std::size_t i = 0; i < param_cols.size(); ++i)
      values[i] = parse_int(fields[param_cols[i]], row, space.parameter_names()[i]);
    Status status;
    try {
      status = parse_status(fields[status_col]);
    } catch (const ValueError& e) {
      throw ValueError(row_label(row) + ": " + e.what());
    }
    records.push_back(
        make_record(space, std::move(values), parse_objective(fields[objective_col], row), status, row));
  }
  if (!have_header) throw SchemaError("CSV input has no header");
  return records;
}

std::vector<TuningRecord> read_jsonl(std::string_view text, const ParameterSpace& space) {
  std::vector<TuningRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                   : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(raw).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(row_label(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw SchemaError(row_label(line_no) + ": expected a JSON object");
    std::vector<std::int64_t> values;
    for (const auto& name : space.parameter_names()) {
      const auto it = obj.find(name);
      if (it == obj.end()) throw SchemaError(row_label(line_no) + ": missing key '" + name + "'");
      if (!it->is_number_integer())
        throw ValueError(row_label(line_no) + ", parameter '" + name + "': not an integer");
      values.push_back(it->get<std::int64_t>());
    }
    const auto st = obj.find("status");
    if (st == obj.end() || !st->is_string())
      throw SchemaError(row_label(line_no) + ": missing string key 'status'");
    std::optional<double> objective;
    if (const auto ob = obj.find("objective_ms"); ob != obj.end() && !ob->is_null()) {
      if (!ob->is_number())
        throw ValueError(row_label(line_no) + ": objective_ms is not a number");
      objective = ob->get<double>();
    }
    Status status;
    try {
      status = parse_status(st->get<std::string>());
    } catch (const ValueError& e) {
      throw ValueError(row_label(line_no) + ": " + e.what());
    }
    records.push_back(make_record(space, std::move(values), objective, status, line_no));
  }
  return records;
}

}  // namespace

DeviceDataset ingest_text(std::string_view text, DataFormat format, SpacePtr space,
                          const IngestOptions& options) {
  auto records = format == DataFormat::csv ? read_csv(text, *space) : read_jsonl(text, *space);
  return DeviceDataset(options.device, std::move(space), std::move(records), options.duplicates);
}

DeviceDataset ingest(const std::string& path, DataFormat format, SpacePtr space,
                     const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  IngestOptions resolved = options;
  if (resolved.device.empty()) resolved.device = std::filesystem::path(path).stem().string();
  return ingest_text(buffer.str(), format, std::move(space), resolved);
}

// ---------------------------------------------------------------------------
// Export

std::string format_objective(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string export_text(const DeviceDataset& ds, DataFormat format) {
  std::string out;
  const auto& names = ds.space().parameter_names();
  if (format == DataFormat::csv) {
    for (const auto& n : names) out += n + ",";
    out += "objective_ms,status\n";
    for (const auto& e : ds.entries()) {
      for (const auto v : e.record.config.values) out += std::to_string(v) + ",";
      if (e.record.objective) out += format_objective(*e.record.objective);
      out += ",";
      out += to_string(e.record.status);
      out += "\n";
    }
    return out;
  }
  for (const auto& e : ds.entries()) {
    out += "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
      out += nlohmann::json(names[i]).dump() + ":" + std::to_string(e.record.config.values[i]) + ",";
    }
    out += "\"objective_ms\":";
    out += e.record.objective ? format_objective(*e.record.objective) : "null";
    out += ",\"status\":\"";
    out += to_string(e.record.status);
    out += "\"}\n";
  }
  return out;
}

void export_file(const DeviceDataset& ds, DataFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << export_text(ds, format);
  if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Study

void StudyDataset::add(DeviceDataset ds) {
  if (!devices_.empty() && !(ds.space() == devices_.front().space()))
    throw SchemaError("device '" + ds.device() + "' uses a different space definition");
  if (device(ds.device()))
    throw SchemaError("device '" + ds.device() + "' already present in study");
  devices_.push_back(std::move(ds));
}

const DeviceDataset* StudyDataset::device(std::string_view name) const {
  for (const auto& d : devices_)
    if (d.device() == name) return &d;
  return nullptr;
}

}  // namespace tunescape

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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "tunescape/analyses.hpp"
#include "tunescape/error.hpp"
#include "tunescape/landscape.hpp"
#include "tunescape/surrogate.hpp"
#include "tunescape/tuners.hpp"

namespace tunescape::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flag combinations detected after parsing; reported like parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  // space selection
  std::string builtin;
  std::string space_file;
  // datasets
  std::vector<std::string> data;
  std::vector<std::string> devices;
  std::string data_format;
  std::string duplicates = "keep-first";
  // run control
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned jobs = 1;
  std::string out_dir;
  std::string format = "json";
  bool timestamp = false;
  // space
  std::size_t count = 10;
  std::size_t limit = 0;
  // analyses
  std::size_t bins = 20;
  std::size_t repetitions = 100;
  std::size_t budget_cap = 0;
  std::string neighborhood = "adjacent1";
  double p = 0.0;
  std::string denominator = "minima";
  std::size_t walks = 0;
  double threshold = 0.05;
  std::size_t repeats = 10;
  std::size_t trees = 200;
  std::size_t depth = 6;
  double learning_rate = 0.1;
  double train_fraction = 0.8;
  // tuners
  std::string table;
  std::string synthetic;
  std::string command;
  std::string dims;
  double noise = 0.0;
  std::size_t budget = 100;
  std::uint32_t samples = 1;
  bool adaptive = false;
  std::uint32_t min_samples = 3;
  std::uint32_t max_samples = 30;
  double confidence = 0.95;
  bool invalid_free = false;
  std::string start;
  std::size_t max_evaluations = 0;
  long long timeout_ms = 120000;
  // synth
  std::string function = "two-cluster";
  std::string output;
};

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      dims.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--dims expects comma-separated positive integers, got '" + text + "'");
    }
  }
  if (dims.empty()) throw UsageError("--dims is empty");
  return dims;
}

std::vector<std::int64_t> parse_values(const std::string& text) {
  std::vector<std::int64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--start expects comma-separated integers, got '" + text + "'");
    }
  }
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw IoError("cannot write '" + path.string() + "'");
  outf << content;
  if (!outf) throw IoError("failed writing '" + path.string() + "'");
}

// Device names may contain spaces or slashes; keep file names portable.
std::string file_safe(const std::string& name) {
  std::string out;
  for (const char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "device" : out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Runner {
 public:
  Runner(std::string command, const Options& o, std::ostream& out)
      : command_(std::move(command)), o_(o), out_(out) {}

  SpacePtr space() {
    if (space_) return space_;
    if (!o_.builtin.empty() && !o_.space_file.empty())
      throw UsageError("--builtin and --space are mutually exclusive");
    if (!o_.builtin.empty()) {
      space_ = std::make_shared<const ParameterSpace>(builtin_space(o_.builtin));
    } else if (!o_.space_file.empty()) {
      record_input(o_.space_file);
      space_ = std::make_shared<const ParameterSpace>(load_space(o_.space_file));
    } else {
      throw UsageError("one of --builtin or --space is required");
    }
    return space_;
  }

  StudyDataset study() {
    if (o_.data.empty()) throw UsageError("at least one --data file is required");
    if (!o_.devices.empty() && o_.devices.size() != o_.data.size())
      throw UsageError("--device must be given once per --data file");
    const auto sp = space();
    StudyDataset s(sp->name());
    for (std::size_t i = 0; i < o_.data.size(); ++i) {
      const auto& path = o_.data[i];
      record_input(path);
      IngestOptions opts;
      opts.device = o_.devices.empty() ? "" : o_.devices[i];
      opts.duplicates =
          o_.duplicates == "keep-min" ? DuplicatePolicy::keep_min : DuplicatePolicy::keep_first;
      s.add(ingest(path, data_format(path), sp, opts));
    }
    return s;
  }

  DataFormat data_format(const std::string& path) const {
    if (!o_.data_format.empty()) return parse_data_format(o_.data_format);
    const auto ext = fs::path(path).extension().string();
    return ext == ".jsonl" || ext == ".json" ? DataFormat::jsonl : DataFormat::csv;
  }

  void record_input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"fnv1a64", file_digest(path)}});
  }

  json manifest(const json& flags) const {
    // Output location, stdout format and thread count do not change report
    // contents, so they stay out of the manifest.
    json resolved = flags;
    if (!o_.builtin.empty()) resolved["builtin"] = o_.builtin;
    if (!o_.space_file.empty()) resolved["space"] = o_.space_file;
    if (!o_.data.empty()) resolved["data"] = o_.data;
    if (!o_.devices.empty()) resolved["device"] = o_.devices;
    if (!o_.table.empty()) resolved["table"] = o_.table;
    json m = {{"command", command_},
              {"flags", std::move(resolved)},
              {"seed", o_.seed},
              {"inputs", inputs_},
              {"tool_version", kToolVersion}};
    if (o_.timestamp) {
      const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      m["timestamp"] = buf;
    }
    return m;
  }

  fs::path out_dir(const std::string& benchmark, const std::string& analysis) const {
    fs::path dir = o_.out_dir.empty() ? fs::path("reports") / benchmark / analysis
                                      : fs::path(o_.out_dir);
    fs::create_directories(dir);
    return dir;
  }

  // Writes report.json and any extra files, then echoes the report or the main
  // CSV to stdout.
  void emit(AnalysisReport report, const json& flags,
            const std::vector<std::pair<std::string, std::string>>& files) {
    report.manifest = manifest(flags);
    const auto dir = out_dir(report.benchmark, report.analysis);
    const std::string text = report.to_json().dump(2) + "\n";
    write_file(dir / "report.json", text);
    for (const auto& [name, content] : files) write_file(dir / name, content);
    if (o_.format == "csv" && !files.empty()) {
      out_ << files.front().second;
    } else {
      out_ << text;
    }
  }

  const Options& options() const { return o_; }
  std::ostream& out() { return out_; }

 private:
  std::string command_;
  const Options& o_;
  std::ostream& out_;
  SpacePtr space_;
  json inputs_ = json::array();
};

// ---- space ----

std::string config_header(const ParameterSpace& space) {
  std::string h = "index";
  for (const auto& name : space.parameter_names()) h += "," + name;
  return h + "\n";
}

std::string config_row(ConfigIndex index, const Configuration& c) {
  std::string row = std::to_string(index.value);
  for (const auto v : c.values) row += "," + std::to_string(v);
  return row + "\n";
}

void space_info(Runner& r) {
  const auto sp = r.space();
  auto& out = r.out();
  out << "space: " << sp->name() << "\n";
  out << "parameters: " << sp->dimension() << "\n";
  for (const auto& p : sp->parameters()) out << "  " << p.name << ": " << p.values.size() << " values\n";
  out << "constraints: " << sp->constraint_sources().size() << "\n";
  out << "cardinality: " << cardinality(*sp) << "\n";
  out << "constrained: " << constrained_cardinality(*sp) << "\n";
}

void space_enumerate(Runner& r) {
  const auto sp = r.space();
  auto& out = r.out();
  out << config_header(*sp);
  auto stream = enumerate_valid(*sp);
  std::size_t written = 0;
  while (auto item = stream.next()) {
    if (r.options().limit && written == r.options().limit) break;
    out << config_row(item->first, item->second);
    ++written;
  }
}

void space_sample(Runner& r) {
  const auto sp = r.space();
  auto& out = r.out();
  ValidSampler sampler(*sp, r.options().seed);
  std::string buffer = config_header(*sp);
  for (std::size_t i = 0; i < r.options().count; ++i) {
    auto item = sampler.next();
    if (!item)
      throw NotEnoughValidConfigs("space '" + sp->name() + "' has only " + std::to_string(i) +
                                  " valid configurations");
    buffer += config_row(item->first, item->second);
  }
  out << buffer;
}

// ---- analyze ----

std::vector<std::string> device_names(const StudyDataset& s) {
  std::vector<std::string> names;
  for (const auto& d : s.devices()) names.push_back(d.device());
  return names;
}

AnalysisReport make_report(const StudyDataset& s, const std::string& analysis, const json& params,
                           std::uint64_t seed) {
  AnalysisReport rep;
  rep.benchmark = s.benchmark();
  rep.devices = device_names(s);
  rep.analysis = analysis;
  rep.params = params;
  rep.seed = seed;
  return rep;
}

void analyze_distribution(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  const json params = {{"bins", o.bins}};
  auto rep = make_report(s, "distribution", params, o.seed);
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& d : s.devices()) {
    const auto dist = distribution(d, o.bins);
    rep.data[d.device()] = to_json(dist);
    files.emplace_back("histogram_" + file_safe(d.device()) + ".csv", histogram_csv(dist));
  }
  r.emit(std::move(rep), params, files);
}

void analyze_convergence(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  const json params = {{"repetitions", o.repetitions}, {"budget_cap", o.budget_cap}};
  auto rep = make_report(s, "convergence", params, o.seed);
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& d : s.devices()) {
    const auto curve = convergence(d, o.repetitions, o.seed, o.budget_cap, o.jobs);
    rep.data[d.device()] = to_json(curve);
    files.emplace_back("convergence_" + file_safe(d.device()) + ".csv", convergence_csv(curve));
  }
  r.emit(std::move(rep), params, files);
}

void analyze_centrality(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  const auto policy = parse_neighborhood(o.neighborhood);
  if (o.denominator != "minima" && o.denominator != "all-nodes")
    throw UsageError("--denominator must be 'minima' or 'all-nodes'");
  const auto denom = o.denominator == "minima" ? CentralityDenominator::minima
                                               : CentralityDenominator::all_nodes;
  const json params = {{"neighborhood", o.neighborhood},
                       {"p", o.p},
                       {"denominator", o.denominator},
                       {"walks", o.walks}};
  auto rep = make_report(s, "centrality", params, o.seed);
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary = "device,proportion,minima,nodes,edges\n";
  for (const auto& d : s.devices()) {
    const auto g = build_ffg(d, policy);
    const auto result = proportion_of_centrality(g, pagerank(g.graph()), o.p, denom);
    json entry = minima_summary(g, result);
    if (o.walks > 0) {
      json arrivals = json::array();
      for (const auto& a : arrival_frequencies(g, o.walks, o.seed, o.jobs))
        arrivals.push_back({{"index", a.minimum.value}, {"frequency", a.frequency}});
      entry["arrival_frequencies"] = std::move(arrivals);
    }
    summary += d.device() + "," + format_real(result.proportion) + "," +
               std::to_string(result.minima.size()) + "," + std::to_string(g.size()) + "," +
               std::to_string(g.graph().edge_count()) + "\n";
    files.emplace_back("edges_" + file_safe(d.device()) + ".csv", edge_list_csv(g));
    files.emplace_back("minima_" + file_safe(d.device()) + ".json", entry.dump(2) + "\n");
    rep.data[d.device()] = std::move(entry);
  }
  files.insert(files.begin(), {"centrality.csv", summary});
  r.emit(std::move(rep), params, files);
}

void analyze_speedup(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  auto rep = make_report(s, "speedup", json::object(), o.seed);
  std::string csv = "device,speedup,median_objective,best_objective,best_index\n";
  for (const auto& d : s.devices()) {
    const auto b = best(d);
    const double med = median_objective(d);
    const double speedup = speedup_over_median(d);
    rep.data[d.device()] = {{"speedup", speedup},
                            {"median_objective", med},
                            {"best_objective", b.objective},
                            {"best_index", b.index.value}};
    csv += d.device() + "," + format_real(speedup) + "," + format_real(med) + "," +
           format_real(b.objective) + "," + std::to_string(b.index.value) + "\n";
  }
  r.emit(std::move(rep), json::object(), {{"speedup.csv", csv}});
}

void analyze_portability(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  if (s.devices().size() < 2) throw UsageError("portability needs at least two --data files");
  auto rep = make_report(s, "portability", json::object(), o.seed);
  const auto m = portability(s);
  rep.data = to_json(m);
  r.emit(std::move(rep), json::object(), {{"portability.csv", portability_csv(m)}});
}

json importance_params(const Options& o) {
  return {{"repeats", o.repeats},         {"trees", o.trees},
          {"depth", o.depth},             {"learning_rate", o.learning_rate},
          {"train_fraction", o.train_fraction}};
}

std::map<std::string, ImportanceMap> importances(const StudyDataset& s, const Options& o,
                                                 json& data) {
  std::map<std::string, ImportanceMap> out;
  const auto& names = s.devices().front().space().parameter_names();
  for (const auto& d : s.devices()) {
    const auto rows = valid_subset(d);
    const auto split = split_train_holdout(rows, o.train_fraction, o.seed);
    BoostingParams bp;
    bp.trees = o.trees;
    bp.depth = o.depth;
    bp.learning_rate = o.learning_rate;
    bp.seed = o.seed;
    const auto model = fit(split.train, bp);
    auto imp = permutation_importance(model, split.holdout, names, o.repeats, o.seed, o.jobs);
    json scores = json::object();
    for (std::size_t i = 0; i < imp.parameters.size(); ++i)
      scores[imp.parameters[i]] = imp.importance[i];
    data[d.device()] = {{"r2", imp.r2_baseline},
                        {"train_rows", split.train.size()},
                        {"holdout_rows", split.holdout.size()},
                        {"importance", std::move(scores)}};
    out.emplace(d.device(), std::move(imp));
  }
  return out;
}

void analyze_importance(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  const json params = importance_params(o);
  auto rep = make_report(s, "importance", params, o.seed);
  const auto imps = importances(s, o, rep.data);
  r.emit(std::move(rep), params, {{"importance.csv", importance_csv(imps)}});
}

void analyze_reduce(Runner& r) {
  const auto& o = r.options();
  const auto s = r.study();
  json params = importance_params(o);
  params["threshold"] = o.threshold;
  auto rep = make_report(s, "reduce", params, o.seed);
  json imp_data = json::object();
  const auto imps = importances(s, o, imp_data);
  std::map<std::string, Configuration> anchors;
  for (const auto& d : s.devices()) anchors[d.device()] = best(d).config;
  const auto reduced = reduce_space(*r.space(), imps, o.threshold, anchors);
  const auto reduced_json = space_to_json(reduced);
  rep.data = {{"importances", std::move(imp_data)},
              {"cardinality", cardinality(*r.space())},
              {"reduced", cardinality(reduced)},
              {"reduce_constrained", constrained_cardinality(reduced)},
              {"reduced_space", reduced_json}};
  r.emit(std::move(rep), params,
         {{"reduced_space.json", reduced_json.dump(2) + "\n"},
          {"importance.csv", importance_csv(imps)}});
}

void analyze_accounting(Runner& r) {
  const auto& o = r.options();
  const auto sp = r.space();
  json params = importance_params(o);
  params["threshold"] = o.threshold;
  std::optional<StudyDataset> s;
  std::map<std::string, ImportanceMap> imps;
  json imp_data = json::object();
  std::vector<const DeviceDataset*> ptrs;
  if (!o.data.empty()) {
    s = r.study();
    imps = importances(*s, o, imp_data);
    for (const auto& d : s->devices()) ptrs.push_back(&d);
  }
  AnalysisReport rep;
  rep.benchmark = sp->name();
  if (s) rep.devices = device_names(*s);
  rep.analysis = "accounting";
  rep.params = params;
  rep.seed = o.seed;
  const auto acc = space_accounting(*sp, ptrs, imps, o.threshold);
  rep.data = to_json(acc);
  rep.data["importances"] = std::move(imp_data);
  auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; };
  const std::string csv = "benchmark,cardinality,constrained,valid_min,valid_max,reduced,"
                          "reduce_constrained\n" +
                          sp->name() + "," + std::to_string(acc.cardinality) + "," +
                          std::to_string(acc.constrained) + "," + opt(acc.valid_min) + "," +
                          opt(acc.valid_max) + "," + std::to_string(acc.reduced) + "," +
                          std::to_string(acc.reduce_constrained) + "\n";
  r.emit(std::move(rep), params, {{"accounting.csv", csv}});
}

// ---- tune ----

struct BackendSetup {
  SpacePtr space;
  std::unique_ptr<DeviceDataset> table;
  std::unique_ptr<ObjectiveBackend> backend;
  std::string kind;
};

BackendSetup make_backend(Runner& r) {
  const auto& o = r.options();
  const int chosen = !o.table.empty() + !o.synthetic.empty() + !o.command.empty();
  if (chosen != 1) throw UsageError("exactly one of --table, --synthetic or --command is required");
  BackendSetup b;
  if (!o.synthetic.empty()) {
    if (o.dims.empty()) throw UsageError("--synthetic needs --dims");
    LandscapeSpec spec;
    spec.dims = parse_dims(o.dims);
    spec.function = parse_landscape_function(o.synthetic);
    b.space = std::make_shared<const ParameterSpace>(synthetic_space(spec));
    b.backend = std::make_unique<SyntheticBackend>(
        std::string(to_string(spec.function)),
        [spec](const Configuration& c) { return landscape_value(spec, c.values); }, o.noise,
        o.seed);
    b.kind = "synthetic";
    return b;
  }
  b.space = r.space();
  if (!o.table.empty()) {
    r.record_input(o.table);
    IngestOptions opts;
    if (!o.devices.empty()) opts.device = o.devices.front();
    b.table = std::make_unique<DeviceDataset>(ingest(o.table, r.data_format(o.table), b.space, opts));
    b.backend = std::make_unique<TableBackend>(*b.table);
    b.kind = "table";
  } else {
    std::vector<std::string> argv;
    std::istringstream ss(o.command);
    for (std::string w; ss >> w;) argv.push_back(w);
    if (argv.empty()) throw UsageError("--command is empty");
    b.backend = std::make_unique<CommandBackend>(argv, *b.space,
                                                 std::chrono::milliseconds(o.timeout_ms));
    b.kind = "command";
  }
  return b;
}

SamplePolicy sample_policy(const Options& o) {
  return o.adaptive ? SamplePolicy::adaptive(o.min_samples, o.max_samples, o.confidence)
                    : SamplePolicy::fixed(o.samples);
}

json trajectory_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json step = {{"index", s.index.value},
                 {"config", s.config.values},
                 {"status", to_string(s.status)},
                 {"objective", s.objective ? json(*s.objective) : json(nullptr)},
                 {"best", s.best ? json(*s.best) : json(nullptr)},
                 {"samples", s.samples_used}};
    if (!s.error.empty()) step["error"] = s.error;
    steps.push_back(std::move(step));
  }
  return {{"algorithm", t.algorithm},
          {"seed", t.seed},
          {"budget", t.budget},
          {"evaluations", t.evaluations},
          {"best_index", t.best_index() ? json(t.best_index()->value) : json(nullptr)},
          {"best_objective", t.best_objective() ? json(*t.best_objective()) : json(nullptr)},
          {"steps", std::move(steps)}};
}

json tune_params(const Options& o, const BackendSetup& b) {
  json params = {{"backend", b.kind},
                 {"policy", o.adaptive ? "adaptive" : "fixed"},
                 {"samples", o.samples}};
  if (o.adaptive) {
    params["min_samples"] = o.min_samples;
    params["max_samples"] = o.max_samples;
    params["confidence"] = o.confidence;
  }
  if (b.kind == "synthetic") {
    params["function"] = o.synthetic;
    params["dims"] = o.dims;
    params["noise"] = o.noise;
  } else if (b.kind == "command") {
    params["command"] = o.command;
    params["timeout_ms"] = o.timeout_ms;
  }
  return params;
}

void emit_trajectory(Runner& r, const BackendSetup& b, const Trajectory& t, json params) {
  AnalysisReport rep;
  rep.benchmark = b.space->name();
  if (b.table) rep.devices = {b.table->device()};
  rep.analysis = "tune-" + t.algorithm;
  rep.params = params;
  rep.data = trajectory_json(t);
  rep.seed = t.seed;
  r.emit(std::move(rep), params, {{"trajectory.csv", trajectory_csv(t)}});
}

bool is_backend_failure(const TrajectoryStep& s) {
  return !s.error.empty() && (s.status == Status::runtime_error || s.status == Status::timeout);
}

int tune_random(Runner& r) {
  const auto& o = r.options();
  auto b = make_backend(r);
  RandomSearchOptions opts;
  opts.budget = o.budget;
  opts.seed = o.seed;
  opts.policy = sample_policy(o);
  opts.invalid_consumes_budget = !o.invalid_free;
  const auto t = random_search(*b.backend, *b.space, opts);
  if (!t.steps.empty() && is_backend_failure(t.steps.front()))
    throw BackendFailure("first evaluation failed: " + t.steps.front().error);
  json params = tune_params(o, b);
  params["budget"] = o.budget;
  params["invalid_consumes_budget"] = !o.invalid_free;
  emit_trajectory(r, b, t, params);
  return kOk;
}

int tune_localsearch(Runner& r) {
  const auto& o = r.options();
  auto b = make_backend(r);
  LocalSearchOptions opts;
  if (!o.start.empty()) opts.start = Configuration{parse_values(o.start)};
  if (opts.start && opts.start->values.size() != b.space->dimension())
    throw UsageError("--start needs one value per parameter");
  opts.neighborhood = parse_neighborhood(o.neighborhood);
  opts.seed = o.seed;
  opts.policy = sample_policy(o);
  opts.max_evaluations = o.max_evaluations;
  const auto t = local_search(*b.backend, *b.space, opts);
  json params = tune_params(o, b);
  params["neighborhood"] = o.neighborhood;
  params["start"] = o.start;
  params["max_evaluations"] = o.max_evaluations;
  emit_trajectory(r, b, t, params);
  return kOk;
}

// ---- synth ----

void synth(Runner& r) {
  const auto& o = r.options();
  if (o.dims.empty()) throw UsageError("synth needs --dims");
  if (o.output.empty()) throw UsageError("synth needs --output");
  LandscapeSpec spec;
  spec.dims = parse_dims(o.dims);
  spec.function = parse_landscape_function(o.function);
  spec.noise = o.noise;
  spec.seed = o.seed;
  const auto ds = synthetic_landscape(spec);
  const fs::path prefix(o.output);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  write_file(prefix.string() + ".csv", export_text(ds, DataFormat::csv));
  write_file(prefix.string() + ".space.json", space_to_json(ds.space()).dump(2) + "\n");
  r.out() << "wrote " << ds.size() << " records to " << prefix.string() << ".csv\n";
}

// ---- option wiring ----

void add_space_options(CLI::App* app, Options& o) {
  // Unknown names are a data error (exit 1), so no membership check here.
  app->add_option("--builtin", o.builtin, "Built-in benchmark space");
  app->add_option("--space", o.space_file, "Space definition JSON file");
}

void add_run_options(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Random seed (falls back to TUNE_LANDSCAPE_SEED)");
  app->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out-dir", o.out_dir,
                  "Output directory (default reports/<benchmark>/<analysis>)");
  app->add_option("--format", o.format, "What to print to stdout")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_flag("--timestamp", o.timestamp, "Record the wall-clock time in the manifest");
}

void add_data_options(CLI::App* app, Options& o, bool required) {
  auto* data = app->add_option("--data", o.data, "Measurement file (repeatable)");
  if (required) data->required();
  app->add_option("--device", o.devices, "Device name for the matching --data file");
  app->add_option("--data-format", o.data_format, "Input format (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--duplicates", o.duplicates, "Duplicate configuration policy")
      ->check(CLI::IsMember({"keep-first", "keep-min"}));
}

void add_importance_options(CLI::App* app, Options& o) {
  app->add_option("--repeats", o.repeats, "Shuffles per parameter")->check(CLI::PositiveNumber);
  app->add_option("--trees", o.trees, "Boosting rounds")->check(CLI::PositiveNumber);
  app->add_option("--depth", o.depth, "Tree depth")->check(CLI::PositiveNumber);
  app->add_option("--learning-rate", o.learning_rate, "Shrinkage")->check(CLI::Range(1e-6, 1.0));
  app->add_option("--train-fraction", o.train_fraction, "Training share of valid rows")
      ->check(CLI::Range(0.05, 0.95));
}

void add_tune_options(CLI::App* app, Options& o) {
  add_space_options(app, o);
  add_run_options(app, o);
  app->add_option("--table", o.table, "Dataset file used as a lookup backend");
  app->add_option("--device", o.devices, "Device name for the --table file");
  app->add_option("--data-format", o.data_format, "Table format (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--synthetic", o.synthetic, "Synthetic landscape function");
  app->add_option("--dims", o.dims, "Synthetic domain sizes, e.g. 10,10");
  app->add_option("--noise", o.noise, "Synthetic multiplicative noise")->check(CLI::NonNegativeNumber);
  app->add_option("--command", o.command, "Executable (and arguments) run per evaluation");
  app->add_option("--timeout-ms", o.timeout_ms, "Per-evaluation timeout for --command")
      ->check(CLI::PositiveNumber);
  app->add_option("--samples", o.samples, "Samples per evaluation (fixed policy)")
      ->check(CLI::PositiveNumber);
  app->add_flag("--adaptive", o.adaptive, "Confidence-interval early termination");
  app->add_option("--min-samples", o.min_samples)->check(CLI::PositiveNumber);
  app->add_option("--max-samples", o.max_samples)->check(CLI::PositiveNumber);
  app->add_option("--confidence", o.confidence)->check(CLI::Range(0.5, 0.999999));
}

std::uint64_t env_seed() {
  const char* text = std::getenv("TUNE_LANDSCAPE_SEED");
  if (!text || !*text) return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != std::string(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("TUNE_LANDSCAPE_SEED is not an unsigned integer: '") + text + "'");
  }
}

}  // namespace

std::string file_digest(const std::string& path) {
  const auto bytes = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Search-space analysis toolkit for autotuning benchmarks", "tunescape");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::map<CLI::App*, std::function<int(Runner&)>> actions;
  auto simple = [](void (*fn)(Runner&)) {
    return [fn](Runner& r) {
      fn(r);
      return kOk;
    };
  };

  auto* space = app.add_subcommand("space", "Inspect a parameter space");
  space->require_subcommand(1);
  {
    auto* info = space->add_subcommand("info", "Print cardinality counts");
    add_space_options(info, o);
    actions[info] = simple(space_info);
    auto* en = space->add_subcommand("enumerate", "Stream valid configurations as CSV");
    add_space_options(en, o);
    en->add_option("--limit", o.limit, "Stop after this many rows (0 = all)");
    actions[en] = simple(space_enumerate);
    auto* sample = space->add_subcommand("sample", "Draw distinct valid configurations");
    add_space_options(sample, o);
    sample->add_option("-n,--count", o.count, "Number of configurations")->check(CLI::PositiveNumber);
    sample->add_option("--seed", o.seed, "Random seed (falls back to TUNE_LANDSCAPE_SEED)");
    actions[sample] = simple(space_sample);
  }

  auto* analyze = app.add_subcommand("analyze", "Analyse measured datasets");
  analyze->require_subcommand(1);
  {
    auto base = [&](const char* name, const char* help, bool data_required = true) {
      auto* sub = analyze->add_subcommand(name, help);
      add_space_options(sub, o);
      add_data_options(sub, o, data_required);
      add_run_options(sub, o);
      return sub;
    };
    auto* dist = base("distribution", "Speedup over the median configuration, per config");
    dist->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
    actions[dist] = simple(analyze_distribution);

    auto* conv = base("convergence", "Median best-so-far of random search");
    conv->add_option("--repetitions", o.repetitions, "Random-search repetitions")
        ->check(CLI::PositiveNumber);
    conv->add_option("--budget-cap", o.budget_cap, "Largest budget (0 = all valid records)");
    actions[conv] = simple(analyze_convergence);

    auto* cent = base("centrality", "Proportion of PageRank centrality held by good minima");
    cent->add_option("--neighborhood", o.neighborhood)
        ->check(CLI::IsMember({"adjacent1", "hamming1"}));
    cent->add_option("--p", o.p, "Relative fitness margin over the optimum")
        ->required()
        ->check(CLI::NonNegativeNumber);
    cent->add_option("--denominator", o.denominator, "minima or all-nodes")
        ->check(CLI::IsMember({"minima", "all-nodes"}));
    cent->add_option("--walks", o.walks, "Also simulate this many descents (0 = skip)");
    actions[cent] = simple(analyze_centrality);

    actions[base("speedup", "Median over best objective")] = simple(analyze_speedup);
    actions[base("portability", "Transfer of each device's optimum to the others")] =
        simple(analyze_portability);

    auto* imp = base("importance", "Permutation importance on a boosted-tree surrogate");
    add_importance_options(imp, o);
    actions[imp] = simple(analyze_importance);

    auto* red = base("reduce", "Keep important parameters, pin the rest to the optima");
    add_importance_options(red, o);
    red->add_option("--threshold", o.threshold, "Importance needed to keep a parameter");
    actions[red] = simple(analyze_reduce);

    auto* acc = base("accounting", "Space size table row", false);
    add_importance_options(acc, o);
    acc->add_option("--threshold", o.threshold, "Importance needed to keep a parameter");
    actions[acc] = simple(analyze_accounting);
  }

  auto* tune = app.add_subcommand("tune", "Run a reference tuner");
  tune->require_subcommand(1);
  {
    auto* rnd = tune->add_subcommand("random", "Random search without replacement");
    add_tune_options(rnd, o);
    rnd->add_option("--budget", o.budget, "Evaluations")->check(CLI::PositiveNumber);
    rnd->add_flag("--invalid-free", o.invalid_free, "Failed evaluations do not consume budget");
    actions[rnd] = tune_random;

    auto* ls = tune->add_subcommand("localsearch", "Randomized first-improvement descent");
    add_tune_options(ls, o);
    ls->add_option("--start", o.start, "Start configuration as comma-separated values");
    ls->add_option("--neighborhood", o.neighborhood)
        ->check(CLI::IsMember({"adjacent1", "hamming1"}));
    ls->add_option("--max-evaluations", o.max_evaluations, "Evaluation cap (0 = none)");
    actions[ls] = tune_localsearch;
  }

  auto* syn = app.add_subcommand("synth", "Write a synthetic landscape dataset");
  syn->add_option("--function", o.function)
      ->check(CLI::IsMember({"sphere", "rastrigin-discrete", "two-cluster", "hotspot-like"}));
  syn->add_option("--dims", o.dims, "Domain sizes, e.g. 70,70")->required();
  syn->add_option("--noise", o.noise)->check(CLI::NonNegativeNumber);
  syn->add_option("--seed", o.seed);
  syn->add_option("--output", o.output, "Output prefix (<prefix>.csv, <prefix>.space.json)")
      ->required();
  actions[syn] = simple(synth);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  // The innermost parsed subcommand decides the action.
  CLI::App* leaf = &app;
  std::string command;
  while (!leaf->get_subcommands().empty()) {
    leaf = leaf->get_subcommands().front();
    command += (command.empty() ? "" : " ") + leaf->get_name();
  }

  try {
    if (auto* opt = leaf->get_option_no_throw("--seed"); opt && opt->count() > 0) {
      o.seed_given = true;
    } else {
      o.seed = env_seed();
    }
    const auto it = actions.find(leaf);
    if (it == actions.end()) throw UsageError("unknown command");
    Runner runner(command, o, out);
    return it->second(runner);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace tunescape::cli

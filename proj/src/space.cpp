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

#include "tunescape/space.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "tunescape/error.hpp"

namespace tunescape {

ParameterSpace::ParameterSpace(std::string name, std::vector<Parameter> parameters,
                               std::vector<std::string> constraints)
    : name_(std::move(name)),
      parameters_(std::move(parameters)),
      constraint_sources_(std::move(constraints)) {
  if (parameters_.empty()) throw SpaceError("space '" + name_ + "' has no parameters");
  for (const auto& p : parameters_) {
    if (p.name.empty()) throw SpaceError("parameter with empty name in '" + name_ + "'");
    if (p.values.empty()) throw SpaceError("parameter '" + p.name + "' has an empty domain");
    for (std::size_t i = 1; i < p.values.size(); ++i)
      if (p.values[i - 1] >= p.values[i])
        throw SpaceError("domain of '" + p.name + "' is not strictly ascending");
    if (std::find(names_.begin(), names_.end(), p.name) != names_.end())
      throw SpaceError("duplicate parameter name '" + p.name + "'");
    names_.push_back(p.name);
  }

  strides_.assign(parameters_.size(), 1);
  for (std::size_t i = parameters_.size(); i-- > 0;) {
    strides_[i] = cardinality_;
    const auto size = static_cast<std::uint64_t>(parameters_[i].values.size());
    if (cardinality_ > std::numeric_limits<std::uint64_t>::max() / size)
      throw SpaceError("cardinality of '" + name_ + "' exceeds 64 bits");
    cardinality_ *= size;
  }

  constraints_.reserve(constraint_sources_.size());
  for (const auto& src : constraint_sources_) constraints_.push_back(parse_constraint(src));
}

std::vector<std::uint64_t> ParameterSpace::dims() const {
  std::vector<std::uint64_t> out;
  out.reserve(parameters_.size());
  for (const auto& p : parameters_) out.push_back(p.values.size());
  return out;
}

std::optional<std::size_t> ParameterSpace::parameter_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> ParameterSpace::ordinal(std::size_t parameter,
                                                   std::int64_t value) const {
  const auto& values = parameters_.at(parameter).values;
  const auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

std::vector<BoundConstraint> ParameterSpace::bind_constraints() const {
  std::vector<BoundConstraint> out;
  out.reserve(constraints_.size());
  for (const auto& c : constraints_) out.emplace_back(c, names_);
  return out;
}

bool operator==(const ParameterSpace& a, const ParameterSpace& b) {
  return a.name_ == b.name_ && a.parameters_ == b.parameters_ &&
         a.constraint_sources_ == b.constraint_sources_;
}

ConstraintChecker::ConstraintChecker(const ParameterSpace& space)
    : bound_(space.bind_constraints()) {}

bool ConstraintChecker::operator()(std::span<const std::int64_t> values) const {
  for (const auto& c : bound_)
    if (!c(values)) return false;
  return true;
}

std::uint64_t cardinality(const ParameterSpace& space) { return space.cardinality(); }

std::uint64_t constrained_cardinality(const ParameterSpace& space) {
  const ConstraintChecker checker(space);
  if (checker.empty()) return space.cardinality();
  std::uint64_t count = 0;
  auto stream = enumerate_valid(space);
  while (stream.next()) ++count;
  return count;
}

std::vector<std::size_t> ordinals(const ParameterSpace& space, const Configuration& config) {
  if (config.values.size() != space.dimension())
    throw InvalidConfiguration("configuration has " + std::to_string(config.values.size()) +
                               " values, space '" + space.name() + "' has " +
                               std::to_string(space.dimension()) + " parameters");
  std::vector<std::size_t> out(space.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto ord = space.ordinal(i, config.values[i]);
    if (!ord)
      throw InvalidConfiguration("value " + std::to_string(config.values[i]) +
                                 " is not in the domain of '" + space.parameter_names()[i] + "'");
    out[i] = *ord;
  }
  return out;
}

ConfigIndex encode(const ParameterSpace& space, const Configuration& config) {
  const auto ords = ordinals(space, config);
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < ords.size(); ++i) index += ords[i] * space.strides()[i];
  return ConfigIndex{index};
}

Configuration decode(const ParameterSpace& space, ConfigIndex index) {
  if (index.value >= space.cardinality())
    throw IndexOutOfRange("index " + std::to_string(index.value) + " out of range for '" +
                          space.name() + "' (cardinality " +
                          std::to_string(space.cardinality()) + ")");
  Configuration config;
  config.values.resize(space.dimension());
  std::uint64_t rest = index.value;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const std::uint64_t ord = rest / space.strides()[i];
    rest %= space.strides()[i];
    config.values[i] = space.parameters()[i].values[ord];
  }
  return config;
}

bool is_domain_valid(const ParameterSpace& space, const Configuration& config) {
  if (config.values.size() != space.dimension()) return false;
  for (std::size_t i = 0; i < space.dimension(); ++i)
    if (!space.ordinal(i, config.values[i])) return false;
  return true;
}

bool is_valid(const ParameterSpace& space, const Configuration& config) {
  return is_domain_valid(space, config) && ConstraintChecker(space)(config.values);
}

// ---------------------------------------------------------------------------
// Enumeration

ValidConfigStream::ValidConfigStream(const ParameterSpace& space)
    : space_(&space), checker_(space), ordinals_(space.dimension(), 0) {
  current_.values.resize(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i)
    current_.values[i] = space.parameters()[i].values[0];
}

bool ValidConfigStream::advance() {
  const auto& params = space_->parameters();
  for (std::size_t i = params.size(); i-- > 0;) {
    if (++ordinals_[i] < params[i].values.size()) {
      current_.values[i] = params[i].values[ordinals_[i]];
      ++index_;
      return true;
    }
    ordinals_[i] = 0;
    current_.values[i] = params[i].values[0];
  }
  return false;
}

std::optional<std::pair<ConfigIndex, Configuration>> ValidConfigStream::next() {
  if (done_) return std::nullopt;
  if (started_ && !advance()) {
    done_ = true;
    return std::nullopt;
  }
  started_ = true;
  while (!checker_(current_.values)) {
    if (!advance()) {
      done_ = true;
      return std::nullopt;
    }
  }
  return std::pair{ConfigIndex{index_}, current_};
}

ValidConfigStream enumerate_valid(const ParameterSpace& space) { return ValidConfigStream(space); }

void for_each_valid(const ParameterSpace& space,
                    const std::function<void(ConfigIndex, const Configuration&)>& fn) {
  auto stream = enumerate_valid(space);
  while (auto item = stream.next()) fn(item->first, item->second);
}

std::vector<ConfigIndex> valid_indices(const ParameterSpace& space) {
  std::vector<ConfigIndex> out;
  const ConstraintChecker checker(space);
  if (checker.empty()) {
    out.reserve(space.cardinality());
    for (std::uint64_t i = 0; i < space.cardinality(); ++i) out.push_back(ConfigIndex{i});
    return out;
  }
  for_each_valid(space, [&](ConfigIndex index, const Configuration&) { out.push_back(index); });
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr std::uint64_t kMinDrawsBeforeFallback = 1000;
constexpr double kMinAcceptance = 0.01;

}  // namespace

ValidSampler::ValidSampler(const ParameterSpace& space, std::uint64_t seed)
    : space_(&space), checker_(space), rng_(make_rng(seed)) {
  if (space.cardinality() <= kEnumerationLimit) switch_to_enumeration();
}

void ValidSampler::switch_to_enumeration() {
  pool_.clear();
  if (checker_.empty() && seen_.empty()) {
    pool_.reserve(space_->cardinality());
    for (std::uint64_t i = 0; i < space_->cardinality(); ++i) pool_.push_back(ConfigIndex{i});
  } else {
    for_each_valid(*space_, [&](ConfigIndex index, const Configuration&) {
      if (!seen_.contains(index.value)) pool_.push_back(index);
    });
  }
  drawn_ = 0;
  enumerated_ = true;
}

std::optional<std::pair<ConfigIndex, Configuration>> ValidSampler::next() {
  if (!enumerated_) {
    for (;;) {
      if (draws_ >= kMinDrawsBeforeFallback &&
          static_cast<double>(accepted_) < kMinAcceptance * static_cast<double>(draws_)) {
        switch_to_enumeration();
        break;
      }
      ++draws_;
      const ConfigIndex index{uniform_below(rng_, space_->cardinality())};
      if (seen_.contains(index.value)) continue;
      auto config = decode(*space_, index);
      if (!checker_(config.values)) continue;
      seen_.insert(index.value);
      ++accepted_;
      return std::pair{index, std::move(config)};
    }
  }
  if (drawn_ >= pool_.size()) return std::nullopt;
  const std::size_t remaining = pool_.size() - drawn_;
  if (remaining > 1) {
    const std::size_t j = drawn_ + static_cast<std::size_t>(uniform_below(rng_, remaining));
    std::swap(pool_[drawn_], pool_[j]);
  }
  const ConfigIndex index = pool_[drawn_++];
  return std::pair{index, decode(*space_, index)};
}

std::vector<Configuration> sample_valid(const ParameterSpace& space, std::size_t n,
                                        std::uint64_t seed) {
  if (ConstraintChecker(space).empty() && n > space.cardinality())
    throw NotEnoughValidConfigs("requested " + std::to_string(n) + " configurations, space '" +
                                space.name() + "' has " + std::to_string(space.cardinality()));
  ValidSampler sampler(space, seed);
  std::vector<Configuration> out;
  out.reserve(n);
  while (out.size() < n) {
    auto item = sampler.next();
    if (!item)
      throw NotEnoughValidConfigs("requested " + std::to_string(n) + " configurations, space '" +
                                  space.name() + "' has only " + std::to_string(out.size()) +
                                  " valid");
    out.push_back(std::move(item->second));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Definition files

ParameterSpace space_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Parameter> params;
    for (const auto& p : doc.at("parameters"))
      params.push_back(Parameter{p.at("name").get<std::string>(),
                                 p.at("values").get<std::vector<std::int64_t>>()});
    std::vector<std::string> constraints;
    if (doc.contains("constraints"))
      constraints = doc.at("constraints").get<std::vector<std::string>>();
    return ParameterSpace(doc.value("name", std::string("unnamed")), std::move(params),
                          std::move(constraints));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid space definition: ") + e.what());
  }
}

nlohmann::json space_to_json(const ParameterSpace& space) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : space.parameters())
    params.push_back({{"name", p.name}, {"values", p.values}});
  return {{"name", space.name()},
          {"parameters", std::move(params)},
          {"constraints", space.constraint_sources()}};
}

ParameterSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open space definition '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
  return space_from_json(doc);
}

}  // namespace tunescape

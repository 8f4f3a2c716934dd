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

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tunescape/constraint.hpp"
#include "tunescape/random.hpp"

namespace tunescape {

struct Parameter {
  std::string name;
  std::vector<std::int64_t> values;  // strictly ascending

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

// Position of a configuration in the row-major mixed-radix order over
// parameter declaration order, using ordinal positions within each domain.
struct ConfigIndex {
  std::uint64_t value = 0;

  friend auto operator<=>(const ConfigIndex&, const ConfigIndex&) = default;
};

struct Configuration {
  std::vector<std::int64_t> values;  // one per parameter, in declaration order

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

class ParameterSpace {
 public:
  // Validates domains (non-empty, strictly ascending), unique names, and that
  // the unconstrained cardinality fits in 64 bits; parses the constraint
  // strings. Throws SpaceError or ParseError. Identifiers in constraints are
  // resolved lazily, see bind_constraints().
  ParameterSpace(std::string name, std::vector<Parameter> parameters,
                 std::vector<std::string> constraints = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<Parameter>& parameters() const noexcept { return parameters_; }
  const std::vector<std::string>& constraint_sources() const noexcept { return constraint_sources_; }
  const std::vector<ConstraintExpr>& constraints() const noexcept { return constraints_; }
  std::size_t dimension() const noexcept { return parameters_.size(); }
  const std::vector<std::string>& parameter_names() const noexcept { return names_; }

  // Domain sizes in declaration order.
  std::vector<std::uint64_t> dims() const;
  // strides()[i] = product of dims after i.
  const std::vector<std::uint64_t>& strides() const noexcept { return strides_; }

  std::optional<std::size_t> parameter_index(std::string_view name) const;
  std::optional<std::size_t> ordinal(std::size_t parameter, std::int64_t value) const;

  // Product of domain sizes.
  std::uint64_t cardinality() const noexcept { return cardinality_; }

  // Throws ConstraintEvalError (UnboundIdentifier) when a constraint names an
  // unknown parameter.
  std::vector<BoundConstraint> bind_constraints() const;

  // Same name, parameters and constraint sources.
  friend bool operator==(const ParameterSpace& a, const ParameterSpace& b);

 private:
  std::string name_;
  std::vector<Parameter> parameters_;
  std::vector<std::string> names_;
  std::vector<std::string> constraint_sources_;
  std::vector<ConstraintExpr> constraints_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t cardinality_ = 1;
};

using SpacePtr = std::shared_ptr<const ParameterSpace>;

// Evaluates a space's constraints against configurations. Construction binds
// identifiers once.
class ConstraintChecker {
 public:
  explicit ConstraintChecker(const ParameterSpace& space);
  bool empty() const noexcept { return bound_.empty(); }
  bool operator()(std::span<const std::int64_t> values) const;

 private:
  std::vector<BoundConstraint> bound_;
};

std::uint64_t cardinality(const ParameterSpace& space);

// Number of configurations satisfying every constraint, by filtered
// enumeration. Equals cardinality() when there are no constraints.
std::uint64_t constrained_cardinality(const ParameterSpace& space);

// Throws InvalidConfiguration when a value is outside its domain or the arity
// is wrong.
ConfigIndex encode(const ParameterSpace& space, const Configuration& config);

// Throws IndexOutOfRange.
Configuration decode(const ParameterSpace& space, ConfigIndex index);

// Domain ordinals of a configuration (throws InvalidConfiguration).
std::vector<std::size_t> ordinals(const ParameterSpace& space, const Configuration& config);

bool is_domain_valid(const ParameterSpace& space, const Configuration& config);

// Domain-valid and satisfies all constraints.
bool is_valid(const ParameterSpace& space, const Configuration& config);

// Streams constraint-satisfying configurations in ascending index order.
class ValidConfigStream {
 public:
  explicit ValidConfigStream(const ParameterSpace& space);

  // Next valid configuration and its index, or nullopt when exhausted.
  std::optional<std::pair<ConfigIndex, Configuration>> next();

 private:
  bool advance();

  const ParameterSpace* space_;
  ConstraintChecker checker_;
  std::vector<std::size_t> ordinals_;
  Configuration current_;
  std::uint64_t index_ = 0;
  bool started_ = false;
  bool done_ = false;
};

ValidConfigStream enumerate_valid(const ParameterSpace& space);

// Calls fn(index, config) for each valid configuration in index order.
void for_each_valid(const ParameterSpace& space,
                    const std::function<void(ConfigIndex, const Configuration&)>& fn);

std::vector<ConfigIndex> valid_indices(const ParameterSpace& space);

// Draws valid configurations uniformly without replacement, one at a time.
//
// Spaces with at most kEnumerationLimit configurations are enumerated and
// shuffled lazily. Larger spaces use rejection sampling over the index range
// and fall back to enumeration once the running acceptance rate drops below
// 1%. For a fixed seed the first k draws do not depend on how many draws
// follow.
class ValidSampler {
 public:
  static constexpr std::uint64_t kEnumerationLimit = 1'000'000;

  ValidSampler(const ParameterSpace& space, std::uint64_t seed);

  // Next configuration, or nullopt once every valid configuration was drawn.
  std::optional<std::pair<ConfigIndex, Configuration>> next();

 private:
  void switch_to_enumeration();

  const ParameterSpace* space_;
  ConstraintChecker checker_;
  Rng rng_;
  bool enumerated_ = false;
  std::vector<ConfigIndex> pool_;
  std::size_t drawn_ = 0;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t draws_ = 0;
  std::uint64_t accepted_ = 0;
};

// n distinct valid configurations, deterministic given seed. Throws
// NotEnoughValidConfigs when fewer than n valid configurations exist.
std::vector<Configuration> sample_valid(const ParameterSpace& space, std::size_t n,
                                        std::uint64_t seed);

// ---- definition files ----

// {"name": str, "parameters": [{"name": str, "values": [int, ...]}, ...],
//  "constraints": [str, ...]}
ParameterSpace space_from_json(const nlohmann::json& doc);
nlohmann::json space_to_json(const ParameterSpace& space);
ParameterSpace load_space(const std::string& path);

// ---- built-in benchmark spaces ----

std::vector<std::string> builtin_space_names();
// Throws UnknownBenchmark.
ParameterSpace builtin_space(std::string_view name);

}  // namespace tunescape

template <>
struct std::hash<tunescape::ConfigIndex> {
  std::size_t operator()(const tunescape::ConfigIndex& i) const noexcept {
    return std::hash<std::uint64_t>{}(i.value);
  }
};

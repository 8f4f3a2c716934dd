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

// Integer expression language for search-space constraints.
//
//   or      := and ( "||" and )*
//   and     := compare ( "&&" compare )*
//   compare := sum ( ( "==" | "!=" | "<" | "<=" | ">" | ">=" ) sum )*
//   sum     := product ( ( "+" | "-" ) product )*
//   product := unary ( ( "*" | "/" | "%" ) unary )*
//   unary   := ( "!" | "-" ) unary | primary
//   primary := integer | identifier | "(" or ")"
//
// All values are 64-bit signed integers with wrap-around arithmetic. Division
// truncates toward zero. Comparisons and boolean operators yield 0 or 1, and a
// constraint holds when its value is non-zero. && and || short-circuit.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tunescape {

enum class UnaryOp { logical_not, negate };

enum class BinaryOp { add, sub, mul, div, mod, eq, ne, lt, le, gt, ge, logical_and, logical_or };

std::string_view symbol(UnaryOp op);
std::string_view symbol(BinaryOp op);

class ConstraintExpr {
 public:
  struct Literal {
    std::int64_t value;
  };
  struct Identifier {
    std::string name;
  };
  struct Unary {
    UnaryOp op;
    std::shared_ptr<const ConstraintExpr> operand;
  };
  struct Binary {
    BinaryOp op;
    std::shared_ptr<const ConstraintExpr> lhs;
    std::shared_ptr<const ConstraintExpr> rhs;
  };
  using Node = std::variant<Literal, Identifier, Unary, Binary>;

  static ConstraintExpr literal(std::int64_t value);
  static ConstraintExpr identifier(std::string name);
  static ConstraintExpr unary(UnaryOp op, ConstraintExpr operand);
  static ConstraintExpr binary(BinaryOp op, ConstraintExpr lhs, ConstraintExpr rhs);

  const Node& node() const noexcept { return node_; }

  // Distinct identifiers in first-occurrence order.
  std::vector<std::string> identifiers() const;

  // Structural equality.
  friend bool operator==(const ConstraintExpr& a, const ConstraintExpr& b);

 private:
  explicit ConstraintExpr(Node node) : node_(std::move(node)) {}
  Node node_;
};

// Throws ParseError carrying the byte offset of the offending token.
ConstraintExpr parse_constraint(std::string_view source);

// Minimal-parenthesis rendering; parse_constraint(to_string(e)) == e for any
// parsed e.
std::string to_string(const ConstraintExpr& expr);

using Binding = std::map<std::string, std::int64_t, std::less<>>;

// Throws UnboundIdentifier or DivisionByZero.
std::int64_t evaluate_value(const ConstraintExpr& expr, const Binding& binding);
bool evaluate(const ConstraintExpr& expr, const Binding& binding);

// A constraint with identifiers resolved to positions in a value vector, for
// evaluation inside enumeration loops.
class BoundConstraint {
 public:
  // Throws UnboundIdentifier if an identifier is not among `names`.
  BoundConstraint(const ConstraintExpr& expr, std::span<const std::string> names);

  std::int64_t value(std::span<const std::int64_t> values) const;
  bool operator()(std::span<const std::int64_t> values) const { return value(values) != 0; }

 private:
  enum class Kind : std::uint8_t { literal, slot, unary, binary };
  struct Op {
    Kind kind;
    std::uint8_t op;
    std::int64_t payload;  // literal value or slot index
    std::uint32_t lhs;
    std::uint32_t rhs;
  };
  std::uint32_t compile(const ConstraintExpr& expr, std::span<const std::string> names);
  std::int64_t run(std::uint32_t at, std::span<const std::int64_t> values) const;

  std::vector<Op> ops_;
  std::uint32_t root_ = 0;
};

}  // namespace tunescape

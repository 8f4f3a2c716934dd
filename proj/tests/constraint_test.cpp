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

#include "constraint_oracle.hpp"
#include "tunescape/constraint.hpp"
#include "tunescape/error.hpp"

namespace tunescape {
namespace {

using E = ConstraintExpr;

TEST(ConstraintParse, ComparisonOfProduct) {
  const auto expected = E::binary(BinaryOp::le,
                                  E::binary(BinaryOp::mul, E::identifier("a"), E::identifier("b")),
                                  E::literal(4));
  EXPECT_EQ(parse_constraint("a*b<=4"), expected);
}

TEST(ConstraintParse, MultiplicationBindsTighterThanAddition) {
  const auto expected = E::binary(BinaryOp::add, E::identifier("a"),
                                  E::binary(BinaryOp::mul, E::identifier("b"), E::identifier("c")));
  EXPECT_EQ(parse_constraint("a+b*c"), expected);
  EXPECT_EQ(parse_constraint(" a +  b*c "), expected);
}

TEST(ConstraintParse, IncompleteInputReportsEndOffset) {
  try {
    parse_constraint("a &&");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_NE(std::string(e.what()).find("expected operand"), std::string::npos);
  }
}

TEST(ConstraintParse, IdentifiersInFirstOccurrenceOrder) {
  const auto ids = parse_constraint("b*a + b > c").identifiers();
  EXPECT_EQ(ids, (std::vector<std::string>{"b", "a", "c"}));
}

TEST(ConstraintEval, ModuloAndDivisionByZero) {
  EXPECT_TRUE(evaluate(parse_constraint("a%b==0"), {{"a", 8}, {"b", 4}}));
  EXPECT_THROW(evaluate_value(parse_constraint("a/b"), {{"a", 8}, {"b", 0}}), DivisionByZero);
}

TEST(ConstraintEval, UnboundIdentifier) {
  EXPECT_THROW(evaluate(parse_constraint("a<q"), {{"a", 1}}), UnboundIdentifier);
  const std::vector<std::string> names{"a"};
  EXPECT_THROW(BoundConstraint(parse_constraint("a<q"), names), UnboundIdentifier);
}

TEST(ConstraintEval, ShortCircuitGuardsDivision) {
  const auto guarded = parse_constraint("b!=0 && a%b==0");
  EXPECT_FALSE(evaluate(guarded, {{"a", 7}, {"b", 0}}));
  EXPECT_TRUE(evaluate(guarded, {{"a", 8}, {"b", 2}}));
}

TEST(ConstraintEval, WrapAroundIsTotal) {
  const Binding big{{"a", std::numeric_limits<std::int64_t>::max()},
                    {"m", std::numeric_limits<std::int64_t>::min()}};
  EXPECT_EQ(evaluate_value(parse_constraint("a+1"), big), std::numeric_limits<std::int64_t>::min());
  EXPECT_EQ(evaluate_value(parse_constraint("m/-1"), big), std::numeric_limits<std::int64_t>::min());
  EXPECT_EQ(evaluate_value(parse_constraint("m%-1"), big), 0);
}

TEST(ConstraintGolden, AllCases) {
  const auto env = testing::golden_binding();
  Binding binding(env.begin(), env.end());
  std::vector<std::string> names;
  std::vector<std::int64_t> values;
  for (const auto& [k, v] : env) {
    names.push_back(k);
    values.push_back(v);
  }
  ASSERT_GE(testing::golden_cases().size(), 30u);
  for (const auto& c : testing::golden_cases()) {
    SCOPED_TRACE(c.source);
    switch (c.outcome) {
      case testing::GoldenOutcome::value: {
        const auto e = parse_constraint(c.source);
        EXPECT_EQ(evaluate_value(e, binding), c.expected);
        EXPECT_EQ(BoundConstraint(e, names).value(values), c.expected);
        break;
      }
      case testing::GoldenOutcome::division_by_zero:
        EXPECT_THROW(evaluate_value(parse_constraint(c.source), binding), DivisionByZero);
        break;
      case testing::GoldenOutcome::unbound:
        EXPECT_THROW(evaluate_value(parse_constraint(c.source), binding), UnboundIdentifier);
        break;
      case testing::GoldenOutcome::parse_error:
        try {
          parse_constraint(c.source);
          ADD_FAILURE() << "expected ParseError";
        } catch (const ParseError& e) {
          EXPECT_EQ(e.offset(), static_cast<std::size_t>(c.expected));
        }
        break;
    }
  }
}

TEST(ConstraintProperty, PrettyPrintRoundTrip) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> names{"a", "b", "c"};
  for (int i = 0; i < 1000; ++i) {
    const auto source = testing::ref_render(*testing::random_expr(rng, 5, names));
    const auto parsed = parse_constraint(source);
    const auto printed = to_string(parsed);
    EXPECT_EQ(parse_constraint(printed), parsed) << source << " -> " << printed;
  }
  // Minimal parentheses keep left-associativity explicit.
  EXPECT_EQ(to_string(parse_constraint("a-(b-c)")), "a - (b - c)");
  EXPECT_EQ(to_string(parse_constraint("(a-b)-c")), "a - b - c");
  EXPECT_EQ(to_string(parse_constraint("!(a<b)")), "!(a < b)");
}

TEST(ConstraintProperty, DifferentialAgainstReferenceEvaluator) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  std::uniform_int_distribution<std::int64_t> value(-10, 10);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto ref = testing::random_expr(rng, 5, names);
    const auto parsed = parse_constraint(testing::ref_render(*ref));
    std::map<std::string, std::int64_t, std::less<>> env;
    std::vector<std::int64_t> slots;
    for (const auto& n : names) {
      env[n] = value(rng);
      slots.push_back(env[n]);
    }
    const Binding binding(env.begin(), env.end());
    const BoundConstraint bound(parsed, names);
    std::optional<std::int64_t> expected;
    try {
      expected = testing::ref_eval(*ref, env);
    } catch (const testing::RefDivByZero&) {
    }
    if (expected) {
      EXPECT_EQ(evaluate_value(parsed, binding), *expected);
      EXPECT_EQ(bound.value(slots), *expected);
      ++compared;
    } else {
      EXPECT_THROW(evaluate_value(parsed, binding), DivisionByZero);
      EXPECT_THROW(bound.value(slots), DivisionByZero);
    }
  }
  EXPECT_GT(compared, 500);
}

}  // namespace
}  // namespace tunescape

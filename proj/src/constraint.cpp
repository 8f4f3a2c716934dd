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

#include "tunescape/constraint.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include "tunescape/error.hpp"

namespace tunescape {

std::string_view symbol(UnaryOp op) {
  return op == UnaryOp::logical_not ? "!" : "-";
}

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::mod: return "%";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::logical_and: return "&&";
    case BinaryOp::logical_or: return "||";
  }
  return "?";
}

ConstraintExpr ConstraintExpr::literal(std::int64_t value) { return ConstraintExpr(Literal{value}); }

ConstraintExpr ConstraintExpr::identifier(std::string name) {
  return ConstraintExpr(Identifier{std::move(name)});
}

ConstraintExpr ConstraintExpr::unary(UnaryOp op, ConstraintExpr operand) {
  return ConstraintExpr(Unary{op, std::make_shared<const ConstraintExpr>(std::move(operand))});
}

ConstraintExpr ConstraintExpr::binary(BinaryOp op, ConstraintExpr lhs, ConstraintExpr rhs) {
  return ConstraintExpr(Binary{op, std::make_shared<const ConstraintExpr>(std::move(lhs)),
                               std::make_shared<const ConstraintExpr>(std::move(rhs))});
}

namespace {

void collect_identifiers(const ConstraintExpr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstraintExpr::Identifier>) {
          for (const auto& seen : out)
            if (seen == n.name) return;
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Unary>) {
          collect_identifiers(*n.operand, out);
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Binary>) {
          collect_identifiers(*n.lhs, out);
          collect_identifiers(*n.rhs, out);
        }
      },
      e.node());
}

}  // namespace

std::vector<std::string> ConstraintExpr::identifiers() const {
  std::vector<std::string> out;
  collect_identifiers(*this, out);
  return out;
}

bool operator==(const ConstraintExpr& a, const ConstraintExpr& b) {
  if (a.node_.index() != b.node_.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node_);
        if constexpr (std::is_same_v<T, ConstraintExpr::Literal>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Identifier>) {
          return lhs.name == rhs.name;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Unary>) {
          return lhs.op == rhs.op && *lhs.operand == *rhs.operand;
        } else {
          return lhs.op == rhs.op && *lhs.lhs == *rhs.lhs && *lhs.rhs == *rhs.rhs;
        }
      },
      a.node_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok {
  integer, ident, plus, minus, star, slash, percent, eq, ne, lt, le, gt, ge, and_, or_, bang,
  lparen, rparen, end
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

std::string_view describe(const Token& t) {
  if (t.kind == Tok::end) return "end of input";
  return t.text;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::end, start, {}};
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return {Tok::integer, start, src_.substr(start, pos_ - start)};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::ident, start, src_.substr(start, pos_ - start)};
    }
    const char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    auto one = [&](Tok k) {
      pos_ += 1;
      return Token{k, start, src_.substr(start, 1)};
    };
    auto two = [&](Tok k) {
      pos_ += 2;
      return Token{k, start, src_.substr(start, 2)};
    };
    switch (c) {
      case '+': return one(Tok::plus);
      case '-': return one(Tok::minus);
      case '*': return one(Tok::star);
      case '/': return one(Tok::slash);
      case '%': return one(Tok::percent);
      case '(': return one(Tok::lparen);
      case ')': return one(Tok::rparen);
      case '<': return n == '=' ? two(Tok::le) : one(Tok::lt);
      case '>': return n == '=' ? two(Tok::ge) : one(Tok::gt);
      case '!': return n == '=' ? two(Tok::ne) : one(Tok::bang);
      case '=':
        if (n == '=') return two(Tok::eq);
        throw ParseError(start, "expected '==', found '='");
      case '&':
        if (n == '&') return two(Tok::and_);
        throw ParseError(start, "expected '&&', found '&'");
      case '|':
        if (n == '|') return two(Tok::or_);
        throw ParseError(start, "expected '||', found '|'");
      default:
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  ConstraintExpr parse() {
    auto e = parse_or();
    if (cur_.kind != Tok::end)
      throw ParseError(cur_.offset, "expected operator or end of input, found '" +
                                        std::string(describe(cur_)) + "'");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  ConstraintExpr parse_or() {
    auto lhs = parse_and();
    while (cur_.kind == Tok::or_) {
      advance();
      lhs = ConstraintExpr::binary(BinaryOp::logical_or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  ConstraintExpr parse_and() {
    auto lhs = parse_compare();
    while (cur_.kind == Tok::and_) {
      advance();
      lhs = ConstraintExpr::binary(BinaryOp::logical_and, std::move(lhs), parse_compare());
    }
    return lhs;
  }

  ConstraintExpr parse_compare() {
    auto lhs = parse_sum();
    for (;;) {
      BinaryOp op;
      switch (cur_.kind) {
        case Tok::eq: op = BinaryOp::eq; break;
        case Tok::ne: op = BinaryOp::ne; break;
        case Tok::lt: op = BinaryOp::lt; break;
        case Tok::le: op = BinaryOp::le; break;
        case Tok::gt: op = BinaryOp::gt; break;
        case Tok::ge: op = BinaryOp::ge; break;
        default: return lhs;
      }
      advance();
      lhs = ConstraintExpr::binary(op, std::move(lhs), parse_sum());
    }
  }

  ConstraintExpr parse_sum() {
    auto lhs = parse_product();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      const auto op = cur_.kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
      advance();
      lhs = ConstraintExpr::binary(op, std::move(lhs), parse_product());
    }
    return lhs;
  }

  ConstraintExpr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      BinaryOp op;
      switch (cur_.kind) {
        case Tok::star: op = BinaryOp::mul; break;
        case Tok::slash: op = BinaryOp::div; break;
        case Tok::percent: op = BinaryOp::mod; break;
        default: return lhs;
      }
      advance();
      lhs = ConstraintExpr::binary(op, std::move(lhs), parse_unary());
    }
  }

  ConstraintExpr parse_unary() {
    if (cur_.kind == Tok::bang || cur_.kind == Tok::minus) {
      const auto op = cur_.kind == Tok::bang ? UnaryOp::logical_not : UnaryOp::negate;
      advance();
      return ConstraintExpr::unary(op, parse_unary());
    }
    return parse_primary();
  }

  ConstraintExpr parse_primary() {
    const Token tok = cur_;
    switch (tok.kind) {
      case Tok::integer: {
        std::int64_t value = 0;
        const auto* first = tok.text.data();
        const auto* last = first + tok.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last)
          throw ParseError(tok.offset, "integer literal out of range");
        advance();
        return ConstraintExpr::literal(value);
      }
      case Tok::ident:
        advance();
        return ConstraintExpr::identifier(std::string(tok.text));
      case Tok::lparen: {
        advance();
        auto inner = parse_or();
        if (cur_.kind != Tok::rparen)
          throw ParseError(cur_.offset, "expected ')', found '" + std::string(describe(cur_)) + "'");
        advance();
        return inner;
      }
      default:
        throw ParseError(tok.offset, "expected operand, found '" + std::string(describe(tok)) + "'");
    }
  }

  Lexer lexer_;
  Token cur_{Tok::end, 0, {}};
};

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::logical_or: return 1;
    case BinaryOp::logical_and: return 2;
    case BinaryOp::eq:
    case BinaryOp::ne:
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge: return 3;
    case BinaryOp::add:
    case BinaryOp::sub: return 4;
    case BinaryOp::mul:
    case BinaryOp::div:
    case BinaryOp::mod: return 5;
  }
  return 0;
}

constexpr int kUnaryPrecedence = 6;
constexpr int kAtomPrecedence = 7;

int precedence(const ConstraintExpr& e) {
  if (const auto* b = std::get_if<ConstraintExpr::Binary>(&e.node())) return precedence(b->op);
  if (std::holds_alternative<ConstraintExpr::Unary>(e.node())) return kUnaryPrecedence;
  return kAtomPrecedence;
}

void render(const ConstraintExpr& e, std::string& out);

void render_child(const ConstraintExpr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  render(e, out);
  if (parens) out += ')';
}

void render(const ConstraintExpr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstraintExpr::Literal>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Identifier>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Unary>) {
          out += symbol(n.op);
          render_child(*n.operand, precedence(*n.operand) < kUnaryPrecedence, out);
        } else {
          const int p = precedence(n.op);
          render_child(*n.lhs, precedence(*n.lhs) < p, out);
          out += ' ';
          out += symbol(n.op);
          out += ' ';
          // Operators are left-associative, so an equal-precedence right child
          // needs explicit grouping.
          render_child(*n.rhs, precedence(*n.rhs) <= p, out);
        }
      },
      e.node());
}

// Wrap-around arithmetic shared by the tree walker and the bound evaluator.
std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::int64_t apply(BinaryOp op, std::int64_t a, std::int64_t b) {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinaryOp::add: return wrap(ua + ub);
    case BinaryOp::sub: return wrap(ua - ub);
    case BinaryOp::mul: return wrap(ua * ub);
    case BinaryOp::div:
      if (b == 0) throw DivisionByZero();
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
    case BinaryOp::mod:
      if (b == 0) throw DivisionByZero();
      if (b == -1) return 0;
      return a % b;
    case BinaryOp::eq: return a == b;
    case BinaryOp::ne: return a != b;
    case BinaryOp::lt: return a < b;
    case BinaryOp::le: return a <= b;
    case BinaryOp::gt: return a > b;
    case BinaryOp::ge: return a >= b;
    case BinaryOp::logical_and: return a != 0 && b != 0;
    case BinaryOp::logical_or: return a != 0 || b != 0;
  }
  return 0;
}

std::int64_t apply(UnaryOp op, std::int64_t v) {
  if (op == UnaryOp::logical_not) return v == 0;
  return wrap(0 - static_cast<std::uint64_t>(v));
}

}  // namespace

ConstraintExpr parse_constraint(std::string_view source) { return Parser(source).parse(); }

std::string to_string(const ConstraintExpr& expr) {
  std::string out;
  render(expr, out);
  return out;
}

std::int64_t evaluate_value(const ConstraintExpr& expr, const Binding& binding) {
  return std::visit(
      [&](const auto& n) -> std::int64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstraintExpr::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Identifier>) {
          const auto it = binding.find(n.name);
          if (it == binding.end()) throw UnboundIdentifier(n.name);
          return it->second;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Unary>) {
          return apply(n.op, evaluate_value(*n.operand, binding));
        } else {
          const std::int64_t lhs = evaluate_value(*n.lhs, binding);
          if (n.op == BinaryOp::logical_and && lhs == 0) return 0;
          if (n.op == BinaryOp::logical_or && lhs != 0) return 1;
          return apply(n.op, lhs, evaluate_value(*n.rhs, binding));
        }
      },
      expr.node());
}

bool evaluate(const ConstraintExpr& expr, const Binding& binding) {
  return evaluate_value(expr, binding) != 0;
}

// ---------------------------------------------------------------------------
// BoundConstraint

BoundConstraint::BoundConstraint(const ConstraintExpr& expr, std::span<const std::string> names) {
  root_ = compile(expr, names);
}

std::uint32_t BoundConstraint::compile(const ConstraintExpr& expr,
                                       std::span<const std::string> names) {
  Op op{};
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstraintExpr::Literal>) {
          op.kind = Kind::literal;
          op.payload = n.value;
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Identifier>) {
          std::size_t slot = 0;
          while (slot < names.size() && names[slot] != n.name) ++slot;
          if (slot == names.size()) throw UnboundIdentifier(n.name);
          op.kind = Kind::slot;
          op.payload = static_cast<std::int64_t>(slot);
        } else if constexpr (std::is_same_v<T, ConstraintExpr::Unary>) {
          op.kind = Kind::unary;
          op.op = static_cast<std::uint8_t>(n.op);
          op.lhs = compile(*n.operand, names);
        } else {
          op.kind = Kind::binary;
          op.op = static_cast<std::uint8_t>(n.op);
          op.lhs = compile(*n.lhs, names);
          op.rhs = compile(*n.rhs, names);
        }
      },
      expr.node());
  ops_.push_back(op);
  return static_cast<std::uint32_t>(ops_.size() - 1);
}

std::int64_t BoundConstraint::run(std::uint32_t at, std::span<const std::int64_t> values) const {
  const Op& op = ops_[at];
  switch (op.kind) {
    case Kind::literal: return op.payload;
    case Kind::slot: return values[static_cast<std::size_t>(op.payload)];
    case Kind::unary: return apply(static_cast<UnaryOp>(op.op), run(op.lhs, values));
    case Kind::binary: {
      const auto bop = static_cast<BinaryOp>(op.op);
      const std::int64_t lhs = run(op.lhs, values);
      if (bop == BinaryOp::logical_and && lhs == 0) return 0;
      if (bop == BinaryOp::logical_or && lhs != 0) return 1;
      return apply(bop, lhs, run(op.rhs, values));
    }
  }
  return 0;
}

std::int64_t BoundConstraint::value(std::span<const std::int64_t> values) const {
  return run(root_, values);
}

}  // namespace tunescape

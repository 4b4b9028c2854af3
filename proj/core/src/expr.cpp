#include "spectral/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "spectral/errors.hpp"

namespace spectral {
namespace detail {

enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Abs, Exp, Sqrt, Cos, Sin };

struct ExprNode {
  Op op = Op::Number;
  double value = 0.0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::Op;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Number;
  n->value = v;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression: " + what + " in \"" + std::string(text_) + "\"", 1,
                      static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool starts_primary() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(' || c == '.' ||
           std::isdigit(static_cast<unsigned char>(c));
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, lhs, parse_unary());
      } else if (starts_primary()) {
        lhs = make_node(Op::Mul, lhs, parse_power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Op::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (accept('(')) {
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (accept('|')) {
      NodePtr inner = parse_sum();
      expect('|');
      return make_node(Op::Abs, inner);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "u") return make_node(Op::Var, nullptr);
      if (name == "pi") return make_number(std::numbers::pi);
      Op op;
      if (name == "abs") {
        op = Op::Abs;
      } else if (name == "exp") {
        op = Op::Exp;
      } else if (name == "sqrt") {
        op = Op::Sqrt;
      } else if (name == "cos") {
        op = Op::Cos;
      } else if (name == "sin") {
        op = Op::Sin;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      expect('(');
      NodePtr arg = parse_sum();
      expect(')');
      return make_node(op, arg);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return make_number(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval(const ExprNode& n, double u) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Var: return u;
    case Op::Add: return eval(*n.lhs, u) + eval(*n.rhs, u);
    case Op::Sub: return eval(*n.lhs, u) - eval(*n.rhs, u);
    case Op::Mul: return eval(*n.lhs, u) * eval(*n.rhs, u);
    case Op::Div: return eval(*n.lhs, u) / eval(*n.rhs, u);
    case Op::Pow: return std::pow(eval(*n.lhs, u), eval(*n.rhs, u));
    case Op::Neg: return -eval(*n.lhs, u);
    case Op::Abs: return std::abs(eval(*n.lhs, u));
    case Op::Exp: return std::exp(eval(*n.lhs, u));
    case Op::Sqrt: return std::sqrt(eval(*n.lhs, u));
    case Op::Cos: return std::cos(eval(*n.lhs, u));
    case Op::Sin: return std::sin(eval(*n.lhs, u));
  }
  return 0.0;
}

bool uses_var(const ExprNode& n) {
  if (n.op == Op::Var) return true;
  return (n.lhs && uses_var(*n.lhs)) || (n.rhs && uses_var(*n.rhs));
}

Growth poly(double e, bool exact) { return {GrowthKind::Polynomial, e, exact}; }
Growth unknown() { return {GrowthKind::Unknown, 0.0, false}; }

Growth analyze(const ExprNode& n);

Growth combine_sum(Growth a, Growth b) {
  using K = GrowthKind;
  if (a.kind == K::Unknown || b.kind == K::Unknown) return unknown();
  if (a.kind == K::SuperPolynomial || b.kind == K::SuperPolynomial) {
    return {K::SuperPolynomial, 0.0, false};
  }
  if (a.kind == K::RapidDecay) return b;
  if (b.kind == K::RapidDecay) return a;
  if (a.exponent == b.exponent) return poly(a.exponent, false);
  const Growth& big = a.exponent > b.exponent ? a : b;
  return poly(big.exponent, big.exact);
}

Growth analyze_pow(const ExprNode& n) {
  using K = GrowthKind;
  if (uses_var(*n.rhs)) return unknown();
  double c = eval(*n.rhs, 0.0);
  Growth base = analyze(*n.lhs);
  if (c == 0.0) return poly(0.0, true);
  switch (base.kind) {
    case K::Polynomial:
      if (c > 0.0) return poly(base.exponent * c, base.exact);
      if (base.exact) return poly(base.exponent * c, true);
      return unknown();
    case K::RapidDecay:
      return c > 0.0 ? base : unknown();
    case K::SuperPolynomial:
      return c > 0.0 ? base : unknown();
    case K::Unknown:
      return unknown();
  }
  return unknown();
}

Growth analyze(const ExprNode& n) {
  using K = GrowthKind;
  switch (n.op) {
    case Op::Number:
      return n.value == 0.0 ? Growth{K::RapidDecay, 0.0, false} : poly(0.0, true);
    case Op::Var: return poly(1.0, true);
    case Op::Add:
    case Op::Sub: return combine_sum(analyze(*n.lhs), analyze(*n.rhs));
    case Op::Neg:
    case Op::Abs: return analyze(*n.lhs);
    case Op::Mul: {
      Growth a = analyze(*n.lhs);
      Growth b = analyze(*n.rhs);
      if (a.kind == K::Unknown || b.kind == K::Unknown) return unknown();
      if (a.kind == K::Polynomial && b.kind == K::Polynomial) {
        return poly(a.exponent + b.exponent, a.exact && b.exact);
      }
      if (a.kind == b.kind) return a;
      if (a.kind == K::Polynomial) return b;
      if (b.kind == K::Polynomial) return a;
      return unknown();  // rapid decay times super-polynomial growth
    }
    case Op::Div: {
      Growth a = analyze(*n.lhs);
      Growth b = analyze(*n.rhs);
      if (a.kind == K::Unknown || b.kind != K::Polynomial || !b.exact) return unknown();
      if (a.kind == K::Polynomial) return poly(a.exponent - b.exponent, a.exact);
      return a;
    }
    case Op::Pow: return analyze_pow(n);
    case Op::Sqrt: {
      ExprNode half;
      half.op = Op::Pow;
      half.lhs = n.lhs;
      half.rhs = make_number(0.5);
      return analyze_pow(half);
    }
    case Op::Cos:
    case Op::Sin: return poly(0.0, false);
    case Op::Exp: {
      Growth arg = analyze(*n.lhs);
      if (arg.kind == K::Unknown) return unknown();
      if (arg.kind == K::RapidDecay) return poly(0.0, true);
      if (arg.kind == K::Polynomial && arg.exponent <= 0.0) return poly(0.0, true);
      // Sign of the argument far out decides between growth and decay.
      double lo = eval(*n.lhs, -1e4);
      double hi = eval(*n.lhs, 1e4);
      if (!std::isfinite(lo) || !std::isfinite(hi)) return unknown();
      if (lo < 0.0 && hi < 0.0) return {K::RapidDecay, 0.0, false};
      if (arg.kind == K::SuperPolynomial || arg.exact) return {K::SuperPolynomial, 0.0, false};
      return unknown();
    }
  }
  return unknown();
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  return Expression(p.parse(), std::string(text));
}

Expression Expression::constant(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return Expression(make_number(value), std::string(buf, ptr));
}

double Expression::operator()(double u) const { return eval(*root_, u); }

bool Expression::depends_on_u() const { return uses_var(*root_); }

Growth Expression::growth() const { return analyze(*root_); }

double evaluate_constant(std::string_view text) {
  Expression e = Expression::parse(text);
  if (e.depends_on_u()) throw ConfigError("expected a constant, got \"" + std::string(text) + "\"");
  double v = e(0.0);
  if (!std::isfinite(v)) throw ConfigError("constant is not finite: \"" + std::string(text) + "\"");
  return v;
}

}  // namespace spectral

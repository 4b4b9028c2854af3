#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace spectral {

/// Asymptotic class of |f(u)| as |u| -> infinity.
enum class GrowthKind {
  Polynomial,       ///< |f(u)| <= C |u|^exponent
  SuperPolynomial,  ///< grows faster than every power
  RapidDecay,       ///< decays faster than every power
  Unknown,
};

struct Growth {
  GrowthKind kind = GrowthKind::Unknown;
  double exponent = 0.0;  ///< meaningful for Polynomial only
  /// Also a lower bound c|u|^exponent (same order at both ends).
  bool exact = false;
};

namespace detail {
struct ExprNode;
}

/// A real function of one variable `u` written in a small expression grammar:
/// numbers, `u`, `pi`, `+ - * / ^`, parentheses, `|x|`, and the functions
/// abs, exp, sqrt, cos, sin. Juxtaposition multiplies (`2pi`, `3u`).
///
/// Immutable; copies share the parsed tree.
class Expression {
 public:
  /// Throws ConfigError carrying the 1-based column of the offending token.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  double operator()(double u) const;

  const std::string& source() const { return source_; }
  bool depends_on_u() const;

  /// Conservative asymptotic bound derived from the syntax tree.
  Growth growth() const;

 private:
  Expression(std::shared_ptr<const detail::ExprNode> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  std::shared_ptr<const detail::ExprNode> root_;
  std::string source_;
};

/// Evaluates a constant expression such as "2pi" or "3*pi/2".
double evaluate_constant(std::string_view text);

}  // namespace spectral

#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace spectral {

using Complex = std::complex<double>;

/// |f(u)| <= scale * (1 + |u - center|)^degree * exp(-rate * (u - center)^2)
struct GaussianEnvelope {
  double scale = 0.0;
  double center = 0.0;
  double rate = 0.0;
  double degree = 0.0;
};

/// One term of the asymptotic form coef * exp(i*frequency*u) * shape(u),
/// valid for |u| >= the owning function's tail radius. `shape` is smooth
/// there and |shape(u)| = O(|u|^-decay).
struct TailTerm {
  Complex coef{1.0, 0.0};
  double frequency = 0.0;
  std::function<Complex(double)> shape;
  double decay = 0.0;
};

/// A complex function of the frequency variable u together with the
/// asymptotic information the integration backend needs: Gaussian envelopes
/// for rapidly decaying functions, or an exact sum of modulated power-law
/// terms beyond a radius for slowly decaying ones.
class FreqFunction {
 public:
  using Fn = std::function<Complex(double)>;

  FreqFunction();  ///< the zero function

  static FreqFunction rapid(Fn f, std::vector<GaussianEnvelope> envelopes, double oscillation = 0.0);

  /// `bound`, `growth`: |f(u)| <= bound * (1+|u|)^growth on all of R.
  static FreqFunction power_tail(Fn f, double radius, std::vector<TailTerm> tail, double bound,
                                 double growth, double oscillation = 0.0);

  Complex operator()(double u) const { return fn_(u); }

  bool is_zero() const { return zero_; }
  bool rapidly_decaying() const { return rapid_; }
  const std::vector<GaussianEnvelope>& envelopes() const { return envelopes_; }
  double tail_radius() const { return radius_; }
  const std::vector<TailTerm>& tail() const { return tail_; }
  double bound() const { return bound_; }
  double growth() const { return growth_; }
  /// Upper bound on the angular frequency of oscillation in u.
  double oscillation() const { return oscillation_; }
  /// Points where f is continuous but not smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  FreqFunction with_breakpoints(std::vector<double> points) const;

  /// Smallest decay exponent of the tail terms (+inf for rapid decay).
  double tail_decay() const;

  FreqFunction conj() const;
  FreqFunction scaled(Complex c) const;
  /// u -> f(u + a)
  FreqFunction shifted(double a) const;
  /// u -> exp(-i*u*t) f(u)
  FreqFunction modulated(double t) const;

  friend FreqFunction operator*(const FreqFunction& a, const FreqFunction& b);
  friend FreqFunction operator+(const FreqFunction& a, const FreqFunction& b);
  friend FreqFunction operator-(const FreqFunction& a, const FreqFunction& b);

  /// For rapidly decaying functions: a radius R such that against a measure
  /// with density growth (1+|u|)^measure_growth the mass outside [-R, R]
  /// is below `relative` times the envelope peak scale.
  double truncation_radius(double measure_growth, double relative) const;
  /// Bound on ∫_{|u|>R} |f| (1+|u|)^measure_growth du from the envelopes.
  double truncation_error(double radius, double measure_growth) const;

 private:
  std::vector<TailTerm> as_tail_terms() const;

  Fn fn_;
  bool zero_ = true;
  bool rapid_ = true;
  std::vector<GaussianEnvelope> envelopes_;
  double radius_ = 0.0;
  std::vector<TailTerm> tail_;
  double bound_ = 0.0;
  double growth_ = 0.0;
  double oscillation_ = 0.0;
  std::vector<double> breakpoints_;
};

/// (1 + u^2)^(-p)
FreqFunction moment_weight(double p);

/// ξ_t(u) = (e^{itu} - 1)/u, extended by i t at u = 0; Taylor branch for |tu| < 1e-4.
Complex increment_kernel_value(double t, double u);
FreqFunction increment_kernel(double t);

/// Wraps a real expression-like callable with a declared polynomial growth.
FreqFunction polynomial_function(std::function<double(double)> f, double growth_exponent, double bound,
                                 double radius = 1.0);

}  // namespace spectral

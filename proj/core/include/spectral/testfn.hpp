#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "spectral/freq_function.hpp"

namespace spectral {

/// A exp(-(x-c)²/(2s²)) exp(iνx)
struct GaussianPacket {
  double center = 0.0;
  double width = 1.0;
  double modulation = 0.0;
  Complex amplitude{1.0, 0.0};
};

/// Σ_m a_m h_m(x - center) over normalized Hermite functions h_m.
struct HermiteExpansion {
  std::vector<Complex> coefficients;
  double center = 0.0;
};

/// A function known only through its transform ψ̂.
struct FourierSide {
  FreqFunction transform;
  std::string expression;  ///< grammar source when built from one
  bool real_valued = false;
};

using TestTerm = std::variant<GaussianPacket, HermiteExpansion, FourierSide>;

/// Normalized Hermite function h_m(x) = (2^m m! √π)^{-1/2} H_m(x) e^{-x²/2}.
double hermite_function(int m, double x);

/// Test function ψ with exact transform ψ̂(u) = ∫ e^{-iux} ψ(x) dx.
/// Immutable; a finite sum of terms.
class TestFunction {
 public:
  TestFunction() = default;  ///< ψ ≡ 0

  static TestFunction gaussian(double center = 0.0, double width = 1.0, double modulation = 0.0,
                               Complex amplitude = 1.0);
  static TestFunction hermite(std::vector<Complex> coefficients, double center = 0.0);
  /// ψ̂ given directly; `real_valued` asserts ψ̂(-u) = conj ψ̂(u).
  static TestFunction fourier_side(FreqFunction transform, bool real_valued = false, std::string expression = {});
  /// ψ̂ from a real expression over u, extended by zero outside [lo, hi).
  static TestFunction fourier_expression(const std::string& expression, double lo, double hi);

  const std::vector<TestTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool real_valued() const;
  /// Time-domain values are available (no FourierSide terms).
  bool has_time_domain() const;

  /// ψ(x). Throws Unsupported when a term is known only in frequency.
  Complex operator()(double x) const;
  FreqFunction fourier_transform() const;
  Complex transform_at(double u) const;

  /// x -> ψ(x - t)
  TestFunction translate(double t) const;

  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator-(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator*(Complex c, const TestFunction& a);

 private:
  std::vector<TestTerm> terms_;
};

inline FreqFunction fourier_transform(const TestFunction& psi) { return psi.fourier_transform(); }
inline TestFunction translate(const TestFunction& psi, double t) { return psi.translate(t); }

/// The increment kernel ξ_t(u) = (e^{itu} - 1)/u, ξ_t(0) = it.
class IncrementKernel {
 public:
  explicit IncrementKernel(double t) : t_(t) {}
  double t() const { return t_; }
  Complex operator()(double u) const { return increment_kernel_value(t_, u); }
  FreqFunction fourier_transform() const { return increment_kernel(t_); }

 private:
  double t_;
};

struct PeriodizedValue {
  Complex value{};
  double tail_bound = 0.0;  ///< bound on the omitted terms |n| > N
};

/// Σ_{|n|<=N} ψ(x + 2πn) with a bound on the remainder. Throws
/// UnreachableTolerance when a term has no time-domain decay certificate.
PeriodizedValue periodize(const TestFunction& psi, double x, int N);

/// Both sides of ∫ (Σ_n ψ(x+2πn)) conj φ(x) dx = c Σ_n ψ̂(n) conj φ̂(n).
struct PoissonPairing {
  Complex periodized;         ///< left side, time-domain quadrature
  Complex fourier_sum;        ///< Σ_n ψ̂(n) conj φ̂(n), lattice summation
  Complex fitted_constant;    ///< periodized / fourier_sum
  double relative_gap = 0.0;  ///< |periodized - fourier_sum/(2π)| / |periodized|
  double error_bound = 0.0;
};

PoissonPairing poisson_pairing(const TestFunction& psi, const TestFunction& phi);

}  // namespace spectral

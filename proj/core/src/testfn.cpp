#include "spectral/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectral/errors.hpp"
#include "spectral/expr.hpp"
#include "spectral/measure.hpp"
#include "spectral/quadrature.hpp"

namespace spectral {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

/// Σ_k |coefficient of x^k in H_m| times the normalization of h_m.
double hermite_envelope_scale(int m) {
  std::vector<double> prev{1.0};  // H_0
  std::vector<double> cur{0.0, 2.0};  // H_1
  if (m == 0) cur = prev;
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  double sum = 0.0;
  for (double c : cur) sum += std::abs(c);
  double log_norm = -0.5 * (m * std::log(2.0) + std::lgamma(m + 1.0) + 0.5 * std::log(kPi));
  return sum * std::exp(log_norm);
}

Complex neg_i_power(int m) {
  switch (m % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

FreqFunction packet_transform(const GaussianPacket& g) {
  Complex pref = g.amplitude * g.width * kSqrt2Pi;
  double c = g.center, s = g.width, nu = g.modulation;
  auto f = [pref, c, s, nu](double u) {
    double v = u - nu;
    return pref * std::polar(std::exp(-0.5 * s * s * v * v), -v * c);
  };
  return FreqFunction::rapid(f, {GaussianEnvelope{std::abs(pref), nu, 0.5 * s * s, 0.0}}, std::abs(c));
}

FreqFunction hermite_transform(const HermiteExpansion& h) {
  std::vector<Complex> coef = h.coefficients;
  double c = h.center;
  int M = static_cast<int>(coef.size()) - 1;
  double scale = 0.0;
  for (int m = 0; m <= M; ++m) scale += std::abs(coef[m]) * hermite_envelope_scale(m);
  auto f = [coef, c](double u) {
    Complex sum{};
    for (std::size_t m = 0; m < coef.size(); ++m)
      if (coef[m] != Complex{}) sum += coef[m] * neg_i_power(static_cast<int>(m)) * hermite_function(static_cast<int>(m), u);
    return kSqrt2Pi * std::polar(1.0, -u * c) * sum;
  };
  return FreqFunction::rapid(f, {GaussianEnvelope{kSqrt2Pi * scale, 0.0, 0.5, static_cast<double>(M)}}, std::abs(c));
}

FreqFunction term_transform(const TestTerm& t) {
  if (const auto* g = std::get_if<GaussianPacket>(&t)) return packet_transform(*g);
  if (const auto* h = std::get_if<HermiteExpansion>(&t)) return hermite_transform(*h);
  return std::get<FourierSide>(t).transform;
}

/// Σ_{k>=0} g(d + 2πk) for a Gaussian-type bound g(y) = (1+y)^m exp(-y²/(2s²)),
/// valid once g is decreasing beyond d; +inf otherwise.
double gaussian_tail_sum(double d, double s, int m) {
  if (d <= 0.0) return kInfinity;
  double a = 1.0 / (s * s);
  if (m == 0) return std::exp(-0.5 * a * d * d) / (-std::expm1(-2.0 * kPi * a * d));
  // (1+y)^m ≤ (1+d)^m exp((y-d) m/(1+d)); need m/(1+d) < a d / 2.
  double rate = 0.5 * a * d - m / (1.0 + d);
  if (rate <= 0.0) return kInfinity;
  double g = std::pow(1.0 + d, m) * std::exp(-0.5 * a * d * d);
  return g / (-std::expm1(-2.0 * kPi * rate));
}

}  // namespace

double hermite_function(int m, double x) {
  double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (m == 0) return h0;
  double h1 = std::sqrt(2.0) * x * h0;
  for (int k = 1; k < m; ++k) {
    double h2 = std::sqrt(2.0 / (k + 1)) * x * h1 - std::sqrt(static_cast<double>(k) / (k + 1)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

TestFunction TestFunction::gaussian(double center, double width, double modulation, Complex amplitude) {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgument("Gaussian packet width must be positive");
  TestFunction out;
  if (amplitude != Complex{}) out.terms_.emplace_back(GaussianPacket{center, width, modulation, amplitude});
  return out;
}

TestFunction TestFunction::hermite(std::vector<Complex> coefficients, double center) {
  if (coefficients.size() > 150) throw InvalidArgument("Hermite expansions are limited to degree 149");
  while (!coefficients.empty() && coefficients.back() == Complex{}) coefficients.pop_back();
  TestFunction out;
  if (!coefficients.empty()) out.terms_.emplace_back(HermiteExpansion{std::move(coefficients), center});
  return out;
}

TestFunction TestFunction::fourier_side(FreqFunction transform, bool real_valued, std::string expression) {
  TestFunction out;
  if (!transform.is_zero()) out.terms_.emplace_back(FourierSide{std::move(transform), std::move(expression), real_valued});
  return out;
}

TestFunction TestFunction::fourier_expression(const std::string& expression, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("Fourier-side test functions need a finite interval");
  Expression e = Expression::parse(expression);
  double peak = 0.0;
  for (int i = 0; i <= 512; ++i) peak = std::max(peak, std::abs(e(lo + (hi - lo) * i / 512.0)));
  double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
  auto f = [e, lo, hi](double u) { return (u >= lo && u < hi) ? Complex{e(u), 0.0} : Complex{}; };
  // exp(1 - (u-mid)²/hw²) >= 1 on the interval; the factor 2 covers sampling.
  FreqFunction ft = FreqFunction::rapid(f, {GaussianEnvelope{2.0 * std::exp(1.0) * peak, mid, 1.0 / (hw * hw), 0.0}})
                        .with_breakpoints({lo, hi});
  return fourier_side(std::move(ft), false, expression);
}

bool TestFunction::real_valued() const {
  for (const auto& t : terms_) {
    if (const auto* g = std::get_if<GaussianPacket>(&t)) {
      if (g->modulation != 0.0 || g->amplitude.imag() != 0.0) return false;
    } else if (const auto* h = std::get_if<HermiteExpansion>(&t)) {
      for (const auto& a : h->coefficients)
        if (a.imag() != 0.0) return false;
    } else if (!std::get<FourierSide>(t).real_valued) {
      return false;
    }
  }
  return true;
}

bool TestFunction::has_time_domain() const {
  return std::none_of(terms_.begin(), terms_.end(), [](const TestTerm& t) { return std::holds_alternative<FourierSide>(t); });
}

Complex TestFunction::operator()(double x) const {
  Complex sum{};
  for (const auto& t : terms_) {
    if (const auto* g = std::get_if<GaussianPacket>(&t)) {
      double y = (x - g->center) / g->width;
      sum += g->amplitude * std::polar(std::exp(-0.5 * y * y), g->modulation * x);
    } else if (const auto* h = std::get_if<HermiteExpansion>(&t)) {
      for (std::size_t m = 0; m < h->coefficients.size(); ++m)
        sum += h->coefficients[m] * hermite_function(static_cast<int>(m), x - h->center);
    } else {
      throw Unsupported("test function term is known only through its Fourier transform");
    }
  }
  return sum;
}

FreqFunction TestFunction::fourier_transform() const {
  FreqFunction out;
  for (const auto& t : terms_) out = out + term_transform(t);
  return out;
}

Complex TestFunction::transform_at(double u) const {
  Complex sum{};
  for (const auto& t : terms_) sum += term_transform(t)(u);
  return sum;
}

TestFunction TestFunction::translate(double t) const {
  if (t == 0.0) return *this;
  TestFunction out;
  for (const auto& term : terms_) {
    if (const auto* g = std::get_if<GaussianPacket>(&term)) {
      GaussianPacket p = *g;
      p.center += t;
      p.amplitude *= std::polar(1.0, -g->modulation * t);
      out.terms_.emplace_back(p);
    } else if (const auto* h = std::get_if<HermiteExpansion>(&term)) {
      HermiteExpansion e = *h;
      e.center += t;
      out.terms_.emplace_back(std::move(e));
    } else {
      FourierSide f = std::get<FourierSide>(term);
      f.transform = f.transform.modulated(t);
      f.expression.clear();
      out.terms_.emplace_back(std::move(f));
    }
  }
  return out;
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  TestFunction out = a;
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  return out;
}

TestFunction operator-(const TestFunction& a, const TestFunction& b) { return a + Complex{-1.0, 0.0} * b; }

TestFunction operator*(Complex c, const TestFunction& a) {
  if (c == Complex{}) return TestFunction();
  TestFunction out;
  for (const auto& term : a.terms_) {
    if (const auto* g = std::get_if<GaussianPacket>(&term)) {
      GaussianPacket p = *g;
      p.amplitude *= c;
      out.terms_.emplace_back(p);
    } else if (const auto* h = std::get_if<HermiteExpansion>(&term)) {
      HermiteExpansion e = *h;
      for (auto& x : e.coefficients) x *= c;
      out.terms_.emplace_back(std::move(e));
    } else {
      FourierSide f = std::get<FourierSide>(term);
      f.transform = f.transform.scaled(c);
      f.real_valued = f.real_valued && c.imag() == 0.0;
      f.expression.clear();
      out.terms_.emplace_back(std::move(f));
    }
  }
  return out;
}

PeriodizedValue periodize(const TestFunction& psi, double x, int N) {
  if (N < 0) throw InvalidArgument("periodization needs N >= 0");
  if (!psi.has_time_domain())
    throw UnreachableTolerance("periodization needs a time-domain decay certificate; Fourier-side terms have none");
  PeriodizedValue out;
  for (int n = -N; n <= N; ++n) out.value += psi(x + 2.0 * kPi * n);
  for (const auto& t : psi.terms()) {
    double c, s, amp;
    int degree = 0;
    if (const auto* g = std::get_if<GaussianPacket>(&t)) {
      c = g->center;
      s = g->width;
      amp = std::abs(g->amplitude);
    } else {
      const auto& h = std::get<HermiteExpansion>(t);
      c = h.center;
      s = 1.0;
      degree = static_cast<int>(h.coefficients.size()) - 1;
      amp = 0.0;
      for (int m = 0; m <= degree; ++m) amp += std::abs(h.coefficients[m]) * hermite_envelope_scale(m);
    }
    // Terms n > N sit at distance x + 2πn - c, terms n < -N at c - x + 2π|n|.
    double right = x + 2.0 * kPi * (N + 1) - c;
    double left = c - x + 2.0 * kPi * (N + 1);
    out.tail_bound += amp * (gaussian_tail_sum(right, s, degree) + gaussian_tail_sum(left, s, degree));
  }
  return out;
}

PoissonPairing poisson_pairing(const TestFunction& psi, const TestFunction& phi) {
  if (!psi.has_time_domain() || !phi.has_time_domain())
    throw UnreachableTolerance("the Poisson pairing needs time-domain test functions");
  PoissonPairing out;
  if (psi.is_zero() || phi.is_zero()) return out;

  // Effective support of φ and the narrowest feature of either function.
  double lo = kInfinity, hi = -kInfinity, narrow = kInfinity, reach = 0.0;
  auto scan = [&](const TestFunction& f, bool is_phi) {
    for (const auto& t : f.terms()) {
      double c, half;
      if (const auto* g = std::get_if<GaussianPacket>(&t)) {
        c = g->center;
        half = 40.0 * g->width;
        narrow = std::min(narrow, g->width);
      } else {
        const auto& h = std::get<HermiteExpansion>(t);
        c = h.center;
        half = std::sqrt(2.0 * h.coefficients.size() + 1.0) + 40.0;
        narrow = std::min(narrow, 1.0 / std::sqrt(2.0 * h.coefficients.size() + 1.0));
      }
      if (is_phi) {
        lo = std::min(lo, c - half);
        hi = std::max(hi, c + half);
      } else {
        reach = std::max(reach, std::abs(c) + half);
      }
    }
  };
  scan(psi, false);
  scan(phi, true);

  double tail = 0.0;
  auto integrand = [&](double x) {
    int N = static_cast<int>(std::ceil((std::abs(x) + reach) / (2.0 * kPi))) + 1;
    PeriodizedValue p = periodize(psi, x, N);
    tail = std::max(tail, p.tail_bound);
    return p.value * std::conj(phi(x));
  };
  std::size_t pieces = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / narrow)), 1, 4000);
  std::vector<std::pair<double, double>> segments;
  for (std::size_t k = 0; k < pieces; ++k)
    segments.emplace_back(lo + (hi - lo) * k / pieces, k + 1 == pieces ? hi : lo + (hi - lo) * (k + 1) / pieces);
  auto lhs = quad::adaptive_gauss_kronrod(integrand, segments, 1e-13, 0.0, 20000);

  FreqFunction product = psi.fourier_transform() * phi.fourier_transform().conj();
  Integral rhs = integrate(SpectralMeasure::comb(), product, {}, IntegrationOptions{1e-13});

  out.periodized = lhs.value;
  out.fourier_sum = rhs.value;
  out.fitted_constant = std::abs(rhs.value) > 0.0 ? lhs.value / rhs.value : Complex{};
  double scale = std::max(std::abs(lhs.value), 1e-300);
  out.relative_gap = std::abs(lhs.value - rhs.value / (2.0 * kPi)) / scale;
  out.error_bound = lhs.error + tail * (hi - lo) + rhs.error_bound / (2.0 * kPi);
  return out;
}

}  // namespace spectral

#include "spectral/qform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "spectral/errors.hpp"

namespace spectral {
namespace {

constexpr double kPi = std::numbers::pi;

void require_class_C(const SpectralMeasure& sigma) {
  const GrowthOrder& g = sigma.growth_order();
  if (!g.in_class) throw InvalidArgument("measure " + sigma.describe() + " is not certified in class C: " + g.reason);
}

double sup_weighted(const FreqFunction& f, int p) {
  auto g = [&f, p](double u) { return std::norm(f(u)) * std::pow(1.0 + u * u, p); };
  double R;
  if (f.rapidly_decaying()) {
    R = std::max(1.0, f.truncation_radius(2.0 * p, 1e-20));
  } else {
    if (2.0 * f.growth() + 2.0 * p > 0.0) return kInfinity;
    R = std::max(4.0, 4.0 * f.tail_radius());
  }
  // Resolve the narrowest envelope and the fastest oscillation.
  double h = R / 4000.0;
  for (const auto& e : f.envelopes())
    if (e.rate > 0.0) h = std::min(h, 0.125 / std::sqrt(e.rate));
  if (f.oscillation() > 0.0) h = std::min(h, 0.25 / f.oscillation());
  h = std::max(h, 2.0 * R / 400000.0);
  std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * R / h));
  double best = 0.0, best_u = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    double u = -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(n);
    double v = g(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  auto [u_star, neg] = boost::math::tools::brent_find_minima([&](double u) { return -g(u); }, best_u - h, best_u + h, 52);
  best = std::max(best, -neg);
  (void)u_star;
  if (!f.rapidly_decaying()) {
    // Beyond R: |f| <= bound (1+|u|)^growth with growth + p <= 0.
    best = std::max(best, f.bound() * f.bound() * std::pow(1.0 + R, 2.0 * f.growth()) * std::pow(1.0 + R * R, p));
  } else {
    for (const auto& e : f.envelopes()) {
      double r = std::max(R - std::abs(e.center), 0.0);
      double tail = e.scale * std::pow(1.0 + r, e.degree) * std::exp(-e.rate * r * r);
      best = std::max(best, tail * tail * std::pow(1.0 + (R + std::abs(e.center)) * (R + std::abs(e.center)), p));
    }
  }
  return best;
}

/// √(∫|a|² dσ ∫|b|² dσ), the natural size of ∫ a conj(b) dσ under cancellation.
double cauchy_schwarz_scale(const FreqFunction& a, const FreqFunction& b, const SpectralMeasure& sigma,
                            const IntegrationOptions& options) {
  Integral qa = integrate(sigma, a * a.conj(), {}, options);
  Integral qb = integrate(sigma, b * b.conj(), {}, options);
  if (qa.divergent || qb.divergent) return 0.0;
  return std::sqrt(std::abs(qa.value) * std::abs(qb.value));
}

}  // namespace

FormValue sesquilinear_form(const FreqFunction& a, const FreqFunction& b, const SpectralMeasure& sigma,
                            double required_rel, const IntegrationOptions& options) {
  require_class_C(sigma);
  if (a.is_zero() || b.is_zero() || sigma.is_zero()) return FormValue{};
  Integral r = integrate(sigma, a * b.conj(), {}, options);
  if (r.divergent) throw UnreachableTolerance("form integral diverges against " + sigma.describe());
  double mag = std::abs(r.value);
  auto too_coarse = [&](double scale) {
    return r.error_bound > std::max(required_rel * scale, 1e-300) && r.error_bound > 1e-14 * std::max(scale, 1.0);
  };
  if (too_coarse(mag) && !(&a != &b && !too_coarse(cauchy_schwarz_scale(a, b, sigma, options)))) {
    throw UnreachableTolerance("form error bound " + std::to_string(r.error_bound) + " exceeds the required " +
                               std::to_string(required_rel) + " relative accuracy");
  }
  return FormValue{r.value, r.error_bound, r.method};
}

FormValue q_sigma(const TestFunction& psi, const SpectralMeasure& sigma, const IntegrationOptions& options) {
  FreqFunction f = psi.fourier_transform();
  FormValue v = sesquilinear_form(f, f, sigma, 1e-8, options);
  v.value = Complex{std::max(v.value.real(), 0.0), 0.0};
  return v;
}

FormValue l_sigma(const TestFunction& psi1, const TestFunction& psi2, const SpectralMeasure& sigma,
                  const IntegrationOptions& options) {
  return sesquilinear_form(psi1.fourier_transform(), psi2.fourier_transform(), sigma, 1e-8, options);
}

FrechetBound frechet_bound(const TestFunction& psi, const SpectralMeasure& sigma) {
  require_class_C(sigma);
  FrechetBound out;
  out.p = sigma.growth_order().p;
  if (psi.is_zero() || sigma.is_zero()) return out;
  out.constant = moment_integral(sigma, out.p).value;
  out.sup = sup_weighted(psi.fourier_transform(), out.p);
  out.bound = out.constant * out.sup;
  out.q = q_sigma(psi, sigma).real();
  out.holds = out.q <= out.bound * (1.0 + 1e-12);
  return out;
}

TestFunction witness_function(double k, double center) {
  if (!(k > 0.0)) throw InvalidArgument("witness parameter k must be positive");
  double s = std::sqrt(2.0 * k);
  return TestFunction::gaussian(0.0, s, center, 1.0 / (s * std::sqrt(2.0 * kPi)));
}

std::vector<WitnessPoint> closability_witness(const SpectralMeasure& sigma, const std::vector<double>& k_values,
                                              double center) {
  std::vector<WitnessPoint> out;
  std::optional<TestFunction> previous;
  for (double k : k_values) {
    TestFunction s = witness_function(k, center);
    WitnessPoint w;
    w.k = k;
    w.l2_norm_sq = std::sqrt(kPi / (2.0 * k)) / (2.0 * kPi);
    w.q = q_sigma(s, sigma);
    if (previous) w.cauchy_gap = q_sigma(s - *previous, sigma);
    previous = s;
    out.push_back(w);
  }
  return out;
}

TranslationCheck translation_invariance_check(const TestFunction& psi, const SpectralMeasure& sigma, double t) {
  TranslationCheck c;
  c.q_orig = q_sigma(psi, sigma).real();
  c.q_shifted = q_sigma(psi.translate(t), sigma).real();
  c.relative_gap = c.q_orig > 0.0 ? std::abs(c.q_shifted - c.q_orig) / c.q_orig : std::abs(c.q_shifted);
  return c;
}

}  // namespace spectral

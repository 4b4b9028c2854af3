#include "spectral/freq_function.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double envelope_peak(const GaussianEnvelope& e) {
  if (e.degree <= 0.0 || e.rate <= 0.0) return e.scale;
  // maximize (1+r)^k exp(-a r^2): k/(1+r) = 2 a r
  double r = 0.5 * (-1.0 + std::sqrt(1.0 + 2.0 * e.degree / e.rate));
  return e.scale * std::pow(1.0 + r, e.degree) * std::exp(-e.rate * r * r);
}

GaussianEnvelope envelope_product(const GaussianEnvelope& x, const GaussianEnvelope& y) {
  GaussianEnvelope out;
  out.rate = x.rate + y.rate;
  out.center = (x.rate * x.center + y.rate * y.center) / out.rate;
  double residual = x.rate * y.rate / out.rate * (x.center - y.center) * (x.center - y.center);
  out.scale = x.scale * y.scale * std::exp(-residual) *
              std::pow(1.0 + std::abs(out.center - x.center), std::max(x.degree, 0.0)) *
              std::pow(1.0 + std::abs(out.center - y.center), std::max(y.degree, 0.0));
  out.degree = std::max(x.degree, 0.0) + std::max(y.degree, 0.0);
  return out;
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

FreqFunction::FreqFunction() : fn_([](double) { return Complex{}; }) {}

FreqFunction FreqFunction::rapid(Fn f, std::vector<GaussianEnvelope> envelopes, double oscillation) {
  FreqFunction out;
  out.fn_ = std::move(f);
  out.zero_ = false;
  out.rapid_ = true;
  out.envelopes_ = std::move(envelopes);
  out.bound_ = 0.0;
  for (const auto& e : out.envelopes_) out.bound_ += envelope_peak(e);
  out.growth_ = 0.0;
  out.oscillation_ = oscillation;
  return out;
}

FreqFunction FreqFunction::power_tail(Fn f, double radius, std::vector<TailTerm> tail, double bound,
                                      double growth, double oscillation) {
  FreqFunction out;
  out.fn_ = std::move(f);
  out.zero_ = false;
  out.rapid_ = false;
  out.radius_ = radius;
  out.tail_ = std::move(tail);
  out.bound_ = bound;
  out.growth_ = growth;
  out.oscillation_ = oscillation;
  for (const auto& term : out.tail_) out.oscillation_ = std::max(out.oscillation_, std::abs(term.frequency));
  return out;
}

FreqFunction FreqFunction::with_breakpoints(std::vector<double> points) const {
  FreqFunction out = *this;
  out.breakpoints_ = merged(breakpoints_, points);
  return out;
}

double FreqFunction::tail_decay() const {
  if (zero_ || rapid_) return kInf;
  double d = kInf;
  for (const auto& t : tail_) d = std::min(d, t.decay);
  return d;
}

std::vector<TailTerm> FreqFunction::as_tail_terms() const {
  if (zero_) return {};
  if (!rapid_) return tail_;
  return {TailTerm{Complex{1.0, 0.0}, 0.0, fn_, kInf}};
}

FreqFunction FreqFunction::conj() const {
  if (zero_) return *this;
  FreqFunction out = *this;
  Fn f = fn_;
  out.fn_ = [f](double u) { return std::conj(f(u)); };
  for (auto& t : out.tail_) {
    Fn s = t.shape;
    t.shape = [s](double u) { return std::conj(s(u)); };
    t.coef = std::conj(t.coef);
    t.frequency = -t.frequency;
  }
  return out;
}

FreqFunction FreqFunction::scaled(Complex c) const {
  if (zero_) return *this;
  if (c == Complex{}) return FreqFunction();
  FreqFunction out = *this;
  Fn f = fn_;
  out.fn_ = [f, c](double u) { return c * f(u); };
  for (auto& e : out.envelopes_) e.scale *= std::abs(c);
  for (auto& t : out.tail_) t.coef *= c;
  out.bound_ *= std::abs(c);
  return out;
}

FreqFunction FreqFunction::shifted(double a) const {
  if (zero_ || a == 0.0) return *this;
  FreqFunction out = *this;
  Fn f = fn_;
  out.fn_ = [f, a](double u) { return f(u + a); };
  for (auto& e : out.envelopes_) e.center -= a;
  for (auto& t : out.tail_) {
    Fn s = t.shape;
    t.shape = [s, a](double u) { return s(u + a); };
    t.coef *= std::polar(1.0, t.frequency * a);
  }
  if (!rapid_) {
    out.radius_ = radius_ + std::abs(a);
    out.bound_ = bound_ * std::pow(1.0 + std::abs(a), std::abs(growth_));
  }
  for (auto& b : out.breakpoints_) b -= a;
  return out;
}

FreqFunction FreqFunction::modulated(double t) const {
  if (zero_ || t == 0.0) return *this;
  FreqFunction out = *this;
  Fn f = fn_;
  out.fn_ = [f, t](double u) { return std::polar(1.0, -u * t) * f(u); };
  for (auto& term : out.tail_) term.frequency -= t;
  out.oscillation_ = oscillation_ + std::abs(t);
  return out;
}

FreqFunction operator*(const FreqFunction& a, const FreqFunction& b) {
  if (a.zero_ || b.zero_) return FreqFunction();
  FreqFunction::Fn fa = a.fn_;
  FreqFunction::Fn fb = b.fn_;
  FreqFunction::Fn prod = [fa, fb](double u) { return fa(u) * fb(u); };
  double osc = a.oscillation_ + b.oscillation_;

  if (a.rapid_ && b.rapid_) {
    std::vector<GaussianEnvelope> env;
    for (const auto& x : a.envelopes_)
      for (const auto& y : b.envelopes_) env.push_back(envelope_product(x, y));
    return FreqFunction::rapid(prod, std::move(env), osc).with_breakpoints(merged(a.breakpoints_, b.breakpoints_));
  }
  if (a.rapid_ || b.rapid_) {
    const FreqFunction& r = a.rapid_ ? a : b;
    const FreqFunction& p = a.rapid_ ? b : a;
    std::vector<GaussianEnvelope> env = r.envelopes_;
    for (auto& e : env) {
      if (p.growth_ > 0.0) {
        e.scale *= p.bound_ * std::pow(1.0 + std::abs(e.center), p.growth_);
        e.degree = std::max(e.degree, 0.0) + p.growth_;
      } else {
        e.scale *= p.bound_;
      }
    }
    return FreqFunction::rapid(prod, std::move(env), osc).with_breakpoints(merged(a.breakpoints_, b.breakpoints_));
  }

  std::vector<TailTerm> tail;
  for (const auto& x : a.tail_) {
    for (const auto& y : b.tail_) {
      auto sx = x.shape;
      auto sy = y.shape;
      tail.push_back(TailTerm{x.coef * y.coef, x.frequency + y.frequency,
                              [sx, sy](double u) { return sx(u) * sy(u); }, x.decay + y.decay});
    }
  }
  return FreqFunction::power_tail(prod, std::max(a.radius_, b.radius_), std::move(tail), a.bound_ * b.bound_,
                                  a.growth_ + b.growth_, osc)
      .with_breakpoints(merged(a.breakpoints_, b.breakpoints_));
}

FreqFunction operator+(const FreqFunction& a, const FreqFunction& b) {
  if (a.zero_) return b;
  if (b.zero_) return a;
  FreqFunction::Fn fa = a.fn_;
  FreqFunction::Fn fb = b.fn_;
  FreqFunction::Fn sum = [fa, fb](double u) { return fa(u) + fb(u); };
  double osc = std::max(a.oscillation_, b.oscillation_);
  if (a.rapid_ && b.rapid_) {
    std::vector<GaussianEnvelope> env = a.envelopes_;
    env.insert(env.end(), b.envelopes_.begin(), b.envelopes_.end());
    return FreqFunction::rapid(sum, std::move(env), osc).with_breakpoints(merged(a.breakpoints_, b.breakpoints_));
  }
  std::vector<TailTerm> tail = a.as_tail_terms();
  auto tb = b.as_tail_terms();
  tail.insert(tail.end(), tb.begin(), tb.end());
  double radius = std::max(a.rapid_ ? 0.0 : a.radius_, b.rapid_ ? 0.0 : b.radius_);
  double growth = std::max(a.growth_, b.growth_);
  return FreqFunction::power_tail(sum, radius, std::move(tail), a.bound_ + b.bound_, growth, osc)
      .with_breakpoints(merged(a.breakpoints_, b.breakpoints_));
}

FreqFunction operator-(const FreqFunction& a, const FreqFunction& b) { return a + b.scaled(-1.0); }

double FreqFunction::truncation_radius(double measure_growth, double relative) const {
  if (zero_) return 0.0;
  double g = std::max(measure_growth, 0.0);
  double radius = 0.0;
  for (const auto& e : envelopes_) {
    if (e.scale == 0.0) continue;
    auto excess = [&](double r) {
      double ar = std::max(e.rate * std::max(r, 1.0), 1e-300);
      return std::log(std::pow(1.0 + r, std::max(e.degree, 0.0)) *
                      std::pow(1.0 + std::abs(e.center) + r, g) / ar) -
             e.rate * r * r - std::log(relative);
    };
    double hi = 1.0;
    while (excess(hi) > 0.0 && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 80; ++i) {
      double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    radius = std::max(radius, std::abs(e.center) + hi);
  }
  return radius;
}

double FreqFunction::truncation_error(double radius, double measure_growth) const {
  double g = std::max(measure_growth, 0.0);
  double total = 0.0;
  for (const auto& e : envelopes_) {
    double r = radius - std::abs(e.center);
    if (r <= 0.0) return kInf;
    double ar = std::max(e.rate * std::max(r, 1.0), 1e-300);
    total += 2.0 * e.scale * std::pow(1.0 + r, std::max(e.degree, 0.0)) *
             std::pow(1.0 + std::abs(e.center) + r, g) * std::exp(-e.rate * r * r) / ar;
  }
  return total;
}

FreqFunction moment_weight(double p) {
  auto f = [p](double u) { return Complex{std::pow(1.0 + u * u, -p), 0.0}; };
  return FreqFunction::power_tail(f, 0.0, {TailTerm{Complex{1.0, 0.0}, 0.0, f, 2.0 * p}}, 1.0, 0.0);
}

Complex increment_kernel_value(double t, double u) {
  double x = t * u;
  if (std::abs(x) < 1e-4) {
    // it * (1 + ix/2 - x^2/6 - ix^3/24 + x^4/120)
    Complex ix{0.0, x};
    Complex series = 1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0 + ix * ix * ix * ix / 120.0;
    return Complex{0.0, t} * series;
  }
  return Complex{std::cos(x) - 1.0, std::sin(x)} / u;
}

FreqFunction increment_kernel(double t) {
  if (t == 0.0) return FreqFunction();
  auto inv = [](double u) { return Complex{1.0 / u, 0.0}; };
  std::vector<TailTerm> tail{
      TailTerm{Complex{1.0, 0.0}, t, inv, 1.0},
      TailTerm{Complex{-1.0, 0.0}, 0.0, inv, 1.0},
  };
  return FreqFunction::power_tail([t](double u) { return increment_kernel_value(t, u); }, 1.0, std::move(tail),
                                  std::abs(t), 0.0, std::abs(t));
}

FreqFunction polynomial_function(std::function<double(double)> f, double growth_exponent, double bound,
                                 double radius) {
  auto g = [f](double u) { return Complex{f(u), 0.0}; };
  return FreqFunction::power_tail(g, radius, {TailTerm{Complex{1.0, 0.0}, 0.0, g, -growth_exponent}}, bound,
                                  std::max(growth_exponent, 0.0));
}

}  // namespace spectral

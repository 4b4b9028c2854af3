#include "spectral/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "spectral/errors.hpp"
#include "spectral/expr.hpp"
#include "spectral/quadrature.hpp"

namespace spectral {

struct SpectralMeasure::Node {
  MeasureKind kind = MeasureKind::Mixture;
  Density density;
  Atomic atomic;
  SelfSimilar ifs;
  std::vector<Component> components;
  Shift shift;
  GrowthOrder growth;
  Interval hull;
  bool finite_mass = true;
  bool finite_atomic = false;
  bool zero = false;
};

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

GrowthOrder order_from_exponent(double alpha, Certification c) {
  GrowthOrder g;
  g.certification = c;
  if (std::isnan(alpha) || alpha == kInfinity) {
    g.in_class = false;
    g.reason = "super-polynomial growth";
    return g;
  }
  g.in_class = true;
  if (alpha == -kInfinity) return g;
  g.p = std::max(0, static_cast<int>(std::floor((alpha + 1.0) / 2.0)) + 1);
  return g;
}

/// Maps [0, 1] onto an interval, stretching infinite ends.
double sample_point(const Interval& I, double s) {
  if (I.bounded()) return I.lo + s * (I.hi - I.lo);
  if (std::isfinite(I.lo)) return I.lo + std::tan(0.5 * kPi * s * 0.999);
  if (std::isfinite(I.hi)) return I.hi - std::tan(0.5 * kPi * (1.0 - s) * 0.999);
  return std::tan(kPi * (s - 0.5) * 0.999);
}

double fit_tail_exponent(const std::function<double(double)>& m, const Interval& support) {
  double best = -kInfinity;
  for (double sign : {-1.0, 1.0}) {
    double prev_log = 0.0;
    bool have_prev = false;
    for (double e = 3.0; e <= 6.0; e += 1.0) {
      double u = sign * std::pow(10.0, e);
      if (!support.contains(u)) break;
      double v = m(u);
      if (!(v > 0.0)) {
        have_prev = false;
        continue;
      }
      double lv = std::log10(v);
      if (have_prev) best = std::max(best, lv - prev_log);
      prev_log = lv;
      have_prev = true;
    }
  }
  // Leave room for slowly varying factors the fit cannot resolve.
  return best == -kInfinity ? best : best + 0.05;
}

void validate_density(const Density& d) {
  if (!d.fn) throw InvalidArgument("density has no function");
  if (d.support.empty()) throw InvalidArgument("density support is empty");
  for (int i = 0; i <= 256; ++i) {
    double u = sample_point(d.support, (i + 0.5) / 257.0);
    double v = d.fn(u);
    if (std::isnan(v) || v < 0.0) {
      std::ostringstream os;
      os << "density is negative or undefined at u = " << u;
      throw InvalidArgument(os.str());
    }
  }
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string exact_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Interval SelfSimilar::hull() const {
  double lo = kInfinity, hi = -kInfinity;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    double fixed = offsets[i] / (1.0 - ratios[i]);
    lo = std::min(lo, fixed);
    hi = std::max(hi, fixed);
  }
  return {lo, hi};
}

double SelfSimilar::barycenter() const {
  double num = 0.0, den = 1.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    num += probabilities[i] * offsets[i];
    den -= probabilities[i] * ratios[i];
  }
  return num / den;
}

std::string to_string(IntegrationMethod m) {
  switch (m) {
    case IntegrationMethod::ClosedForm: return "closed_form";
    case IntegrationMethod::Quadrature: return "quadrature";
    case IntegrationMethod::LatticeSum: return "lattice_sum";
    case IntegrationMethod::IfsRecursion: return "ifs_recursion";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Construction

SpectralMeasure SpectralMeasure::density(Density d) {
  validate_density(d);
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::Density;
  std::sort(d.singularities.begin(), d.singularities.end(),
            [](const Singularity& a, const Singularity& b) { return a.location < b.location; });
  bool bad_singularity = false;
  for (const auto& s : d.singularities) bad_singularity = bad_singularity || s.exponent <= -1.0;
  if (bad_singularity) {
    node->growth.in_class = false;
    node->growth.reason = "non-integrable local singularity";
  } else if (d.support.bounded()) {
    node->growth = GrowthOrder{true, 0, Certification::Analytic, ""};
  } else {
    node->growth = order_from_exponent(d.tail_exponent, d.certification);
  }
  node->hull = d.support;
  node->finite_mass = !bad_singularity && (d.support.bounded() || d.tail_exponent < -1.0);
  node->density = std::move(d);
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::density(const std::string& expression, Interval support,
                                         std::optional<double> tail_exponent,
                                         std::vector<Singularity> singularities) {
  Expression e = Expression::parse(expression);
  Density d;
  d.fn = [e](double u) { return e(u); };
  d.expression = expression;
  d.support = support;
  d.singularities = std::move(singularities);
  if (tail_exponent) {
    d.tail_exponent = *tail_exponent;
  } else {
    Growth g = e.growth();
    switch (g.kind) {
      case GrowthKind::Polynomial:
        d.tail_exponent = g.exponent;
        d.tail_exact = g.exact;
        break;
      case GrowthKind::RapidDecay: d.tail_exponent = -kInfinity; break;
      case GrowthKind::SuperPolynomial: d.tail_exponent = kInfinity; break;
      case GrowthKind::Unknown:
        d.tail_exponent = fit_tail_exponent(d.fn, support);
        d.certification = Certification::Numeric;
        break;
    }
  }
  return density(std::move(d));
}

SpectralMeasure SpectralMeasure::lebesgue(Interval support, double value) {
  if (!(value > 0.0)) throw InvalidArgument("Lebesgue density value must be positive");
  Density d;
  d.fn = [value](double) { return value; };
  d.expression = exact_number(value);
  d.support = support;
  d.tail_exponent = 0.0;
  d.tail_exact = true;
  return density(std::move(d));
}

SpectralMeasure SpectralMeasure::fbm(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("Hurst index must lie in (0, 1)");
  double c = std::abs(hurst - 0.5) < 1e-12
                 ? 1.0 / kPi
                 : hurst * (1.0 - 2.0 * hurst) / (std::tgamma(2.0 - 2.0 * hurst) * std::cos(kPi * hurst));
  double a = 1.0 - 2.0 * hurst;
  Density d;
  d.fn = [c, a](double u) { return c * std::pow(std::abs(u), a); };
  std::ostringstream os;
  os.precision(17);
  os << c << "*|u|^(" << a << ")";
  d.expression = os.str();
  d.tail_exponent = a;
  d.tail_exact = true;
  d.singularities = {Singularity{0.0, a}};
  return density(std::move(d));
}

SpectralMeasure SpectralMeasure::atoms(std::vector<Atom> atoms) {
  std::map<double, double> merged;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight) || !std::isfinite(a.location))
      throw InvalidArgument("atom weights must be finite and nonnegative");
    if (a.weight > 0.0) merged[a.location] += a.weight;
  }
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::Atomic;
  for (const auto& [x, w] : merged) node->atomic.atoms.push_back({x, w});
  node->growth = GrowthOrder{true, 0, Certification::Analytic, ""};
  node->finite_atomic = true;
  node->zero = merged.empty();
  node->hull = merged.empty() ? Interval{0.0, 0.0} : Interval{merged.begin()->first, merged.rbegin()->first};
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::dirac(double location, double weight) { return atoms({{location, weight}}); }

SpectralMeasure SpectralMeasure::lattice(Lattice l) {
  if (!(l.spacing > 0.0) || !std::isfinite(l.spacing)) throw InvalidArgument("lattice spacing must be positive");
  if (!(l.weight > 0.0)) throw InvalidArgument("lattice weight must be positive");
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::Atomic;
  node->growth = order_from_exponent(l.weight_growth, Certification::Analytic);
  node->finite_mass = false;
  node->atomic.lattice = l;
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::comb() { return lattice(Lattice{}); }

SpectralMeasure SpectralMeasure::self_similar(SelfSimilar s) {
  std::size_t n = s.ratios.size();
  if (n < 2 || s.offsets.size() != n || s.probabilities.size() != n)
    throw InvalidArgument("self-similar measure needs at least two maps with matching offsets and probabilities");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.ratios[i] > 0.0 && s.ratios[i] < 1.0)) throw InvalidArgument("contraction ratios must lie in (0, 1)");
    if (!(s.probabilities[i] > 0.0)) throw InvalidArgument("IFS probabilities must be positive");
    total += s.probabilities[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("IFS probabilities must sum to 1");
  if (!(s.mass > 0.0)) throw InvalidArgument("IFS mass must be positive");
  if (s.depth < 1 || s.depth > 60) throw InvalidArgument("IFS depth must lie in [1, 60]");
  Interval h = s.hull();
  if (!(h.hi > h.lo)) throw InvalidArgument("IFS maps share a fixed point; the measure would be a single atom");
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::SelfSimilarIFS;
  node->growth = GrowthOrder{true, 0, Certification::Analytic, ""};
  node->hull = h;
  node->ifs = std::move(s);
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::cantor(double mass) {
  return self_similar(SelfSimilar{{1.0 / 3.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}, {0.5, 0.5}, mass, 24});
}

SpectralMeasure SpectralMeasure::mixture(std::vector<std::pair<double, SpectralMeasure>> components) {
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::Mixture;
  node->growth = GrowthOrder{true, 0, Certification::Analytic, ""};
  node->finite_atomic = true;
  node->zero = true;
  double lo = kInfinity, hi = -kInfinity;
  for (auto& [c, m] : components) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("mixture coefficients must be finite and nonnegative");
    if (c == 0.0 || m.is_zero()) continue;
    const GrowthOrder& g = m.growth_order();
    if (!g.in_class) {
      node->growth.in_class = false;
      node->growth.reason = g.reason;
    } else if (node->growth.in_class) {
      node->growth.p = std::max(node->growth.p, g.p);
      if (g.certification == Certification::Numeric) node->growth.certification = Certification::Numeric;
    }
    node->finite_mass = node->finite_mass && m.finite_mass();
    node->finite_atomic = node->finite_atomic && m.finite_atomic();
    node->zero = false;
    Interval h = m.hull();
    lo = std::min(lo, h.lo);
    hi = std::max(hi, h.hi);
    node->components.push_back(Component{c, std::make_shared<const SpectralMeasure>(m)});
  }
  node->hull = node->zero ? Interval{0.0, 0.0} : Interval{lo, hi};
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::shifted(const SpectralMeasure& base, double offset) {
  if (!std::isfinite(offset)) throw InvalidArgument("shift offset must be finite");
  if (offset == 0.0) return base;
  auto node = std::make_shared<Node>();
  node->kind = MeasureKind::Shifted;
  node->growth = base.growth_order();
  node->finite_mass = base.finite_mass();
  node->finite_atomic = base.finite_atomic();
  node->zero = base.is_zero();
  node->hull = base.hull().shifted(offset);
  node->shift = Shift{std::make_shared<const SpectralMeasure>(base), offset};
  return SpectralMeasure(node);
}

SpectralMeasure SpectralMeasure::zero() { return mixture({}); }

MeasureKind SpectralMeasure::kind() const { return node_->kind; }

const Density& SpectralMeasure::as_density() const {
  if (node_->kind != MeasureKind::Density) throw InvalidArgument("measure is not a density");
  return node_->density;
}
const Atomic& SpectralMeasure::as_atomic() const {
  if (node_->kind != MeasureKind::Atomic) throw InvalidArgument("measure is not atomic");
  return node_->atomic;
}
const SelfSimilar& SpectralMeasure::as_self_similar() const {
  if (node_->kind != MeasureKind::SelfSimilarIFS) throw InvalidArgument("measure is not self-similar");
  return node_->ifs;
}
const std::vector<Component>& SpectralMeasure::components() const {
  if (node_->kind != MeasureKind::Mixture) throw InvalidArgument("measure is not a mixture");
  return node_->components;
}
const Shift& SpectralMeasure::as_shift() const {
  if (node_->kind != MeasureKind::Shifted) throw InvalidArgument("measure is not shifted");
  return node_->shift;
}

const GrowthOrder& SpectralMeasure::growth_order() const { return node_->growth; }
bool SpectralMeasure::is_zero() const { return node_->zero; }
Interval SpectralMeasure::hull() const { return node_->hull; }
bool SpectralMeasure::finite_atomic() const { return node_->finite_atomic; }
bool SpectralMeasure::finite_mass() const { return node_->finite_mass; }

std::string SpectralMeasure::describe() const {
  const Node& n = *node_;
  switch (n.kind) {
    case MeasureKind::Density: {
      std::string s = "density(" + (n.density.expression.empty() ? std::string("derived") : n.density.expression);
      if (n.density.support.lo > -kInfinity || n.density.support.hi < kInfinity)
        s += " on [" + format_number(n.density.support.lo) + ", " + format_number(n.density.support.hi) + ")";
      return s + ")";
    }
    case MeasureKind::Atomic:
      if (n.atomic.lattice) {
        const Lattice& l = *n.atomic.lattice;
        return "lattice(h=" + format_number(l.spacing) + ", offset=" + format_number(l.offset) +
               ", weight=" + format_number(l.weight) + ", growth=" + format_number(l.weight_growth) + ")";
      }
      return "atoms(" + std::to_string(n.atomic.atoms.size()) + ")";
    case MeasureKind::SelfSimilarIFS: return "ifs(" + std::to_string(n.ifs.ratios.size()) + " maps)";
    case MeasureKind::Mixture: {
      std::string s = "mixture(";
      for (std::size_t i = 0; i < n.components.size(); ++i) {
        if (i) s += " + ";
        s += format_number(n.components[i].coefficient) + "*" + n.components[i].measure->describe();
      }
      return s + ")";
    }
    case MeasureKind::Shifted:
      return "shifted(" + n.shift.base->describe() + ", " + format_number(n.shift.offset) + ")";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Integration

namespace {

Integral divergent_integral(IntegrationMethod method) {
  return Integral{Complex{kInfinity, 0.0}, kInfinity, method, true};
}

/// Rough constant C with m(u) <= C (1+|u|)^g beyond radius R, sampled.
double density_constant(const Density& d, double R, double g) {
  double c = 0.0;
  for (double sign : {-1.0, 1.0}) {
    for (int k = 0; k < 6; ++k) {
      double u = sign * R * std::pow(2.0, k);
      if (!d.support.contains(u)) continue;
      c = std::max(c, d.fn(u) / std::pow(1.0 + std::abs(u), g));
    }
  }
  return 2.0 * c;
}

Integral integrate_density(const Density& d, const FreqFunction& f, const Interval& window,
                           const IntegrationOptions& opt) {
  Interval dom = d.support.intersect(window);
  if (dom.empty() || f.is_zero()) return Integral{{}, 0.0, IntegrationMethod::Quadrature, false};
  const double alpha = d.tail_exponent;
  auto m = [&d](double u) { return d.fn(u); };

  double lo = dom.lo, hi = dom.hi;
  double extra_error = 0.0;
  Complex tails{};
  if (!dom.bounded()) {
    if (alpha == kInfinity) return divergent_integral(IntegrationMethod::Quadrature);
    if (f.rapidly_decaying()) {
      double g = std::max(alpha, 0.0);
      double target = std::min(1e-17, 1e-6 * opt.rel_tol) * std::max(f.bound(), 1e-300);
      double R = std::max(1.0, f.truncation_radius(g, target));
      extra_error += density_constant(d, R, g) * f.truncation_error(R, g);
      lo = std::max(lo, -R);
      hi = std::min(hi, R);
    } else {
      for (const auto& term : f.tail()) {
        double net = term.decay - alpha;
        if (net <= 0.0 || (net <= 1.0 && term.frequency == 0.0))
          return divergent_integral(IntegrationMethod::Quadrature);
      }
      double T = std::max(1.0, f.tail_radius());
      for (const auto& s : d.singularities) T = std::max(T, std::abs(s.location) + 1.0);
      for (double b : f.breakpoints()) T = std::max(T, std::abs(b) + 1.0);
      if (std::isinf(hi)) {
        double start = std::isfinite(lo) ? std::max(T, lo) : T;
        for (const auto& term : f.tail()) {
          auto shape = term.shape;
          auto r = quad::oscillatory_tail([&](double x) { return shape(x) * m(x); }, term.frequency, start,
                                          opt.rel_tol);
          tails += term.coef * r.value;
          extra_error += std::abs(term.coef) * r.error;
        }
        hi = start;
      }
      if (std::isinf(lo)) {
        double start = std::isfinite(hi) ? std::max(T, -hi) : T;
        for (const auto& term : f.tail()) {
          auto shape = term.shape;
          auto r = quad::oscillatory_tail([&](double x) { return shape(-x) * m(-x); }, -term.frequency, start,
                                          opt.rel_tol);
          tails += term.coef * r.value;
          extra_error += std::abs(term.coef) * r.error;
        }
        lo = -start;
      }
    }
  }

  Complex core{};
  double core_error = 0.0;
  if (lo < hi) {
    std::vector<double> points{lo, hi, 0.0};
    std::vector<double> singular;
    for (const auto& s : d.singularities) {
      points.push_back(s.location);
      if (s.exponent < 0.0) singular.push_back(s.location);
    }
    for (double b : f.breakpoints()) points.push_back(b);
    for (const auto& e : f.envelopes()) {
      points.push_back(e.center);
      if (e.rate > 0.0) {
        double w = 1.0 / std::sqrt(e.rate);
        for (double k : {-8.0, -6.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 6.0, 8.0}) points.push_back(e.center + k * w);
      }
    }
    std::erase_if(points, [&](double x) { return !(x >= lo && x <= hi); });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    double osc = f.oscillation();
    double max_len = osc > 0.0 ? 4.0 * kPi / osc : kInfinity;
    std::size_t budget = 2000;
    std::vector<std::pair<double, double>> smooth;
    std::vector<std::pair<double, double>> near_singular;
    auto is_singular = [&](double x) {
      return std::any_of(singular.begin(), singular.end(), [x](double s) { return s == x; });
    };
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      double a = points[i], b = points[i + 1];
      std::size_t pieces = 1;
      if (std::isfinite(max_len)) pieces = std::min<std::size_t>(budget, static_cast<std::size_t>(std::ceil((b - a) / max_len)));
      pieces = std::max<std::size_t>(pieces, 1);
      for (std::size_t k = 0; k < pieces; ++k) {
        double x0 = a + (b - a) * static_cast<double>(k) / static_cast<double>(pieces);
        double x1 = k + 1 == pieces ? b : a + (b - a) * static_cast<double>(k + 1) / static_cast<double>(pieces);
        bool sing = (k == 0 && is_singular(a)) || (k + 1 == pieces && is_singular(b));
        (sing ? near_singular : smooth).emplace_back(x0, x1);
      }
    }
    auto integrand = [&](double u) -> Complex {
      double mv = m(u);
      return mv == 0.0 ? Complex{} : f(u) * mv;
    };
    if (!smooth.empty()) {
      auto r = quad::adaptive_gauss_kronrod(integrand, smooth, opt.rel_tol, opt.abs_tol, opt.max_intervals);
      core += r.value;
      core_error += r.error;
    }
    for (const auto& [a, b] : near_singular) {
      auto r = quad::tanh_sinh(integrand, a, b, opt.rel_tol);
      core += r.value;
      core_error += r.error;
    }
  }
  return Integral{core + tails, core_error + extra_error, IntegrationMethod::Quadrature, false};
}

Integral integrate_atoms(const std::vector<Atom>& atoms, const FreqFunction& f, const Interval& window) {
  Complex sum{};
  double abs_sum = 0.0;
  std::size_t count = 0;
  for (const auto& a : atoms) {
    if (!window.contains(a.location)) continue;
    Complex v = a.weight * f(a.location);
    sum += v;
    abs_sum += std::abs(v);
    ++count;
  }
  return Integral{sum, 4.0 * kEps * static_cast<double>(count + 1) * abs_sum, IntegrationMethod::ClosedForm, false};
}

Integral integrate_lattice(const Lattice& L, const FreqFunction& f, const Interval& window,
                           const IntegrationOptions& opt) {
  const double h = L.spacing;
  const double off = L.offset;
  auto loc = [&](long long n) { return off + static_cast<double>(n) * h; };
  auto term = [&](long long n) {
    double u = loc(n);
    return f(u) * L.weight_at(u);
  };

  bool lo_inf = std::isinf(window.lo);
  bool hi_inf = std::isinf(window.hi);
  long long n_lo = 0, n_hi = 0;
  constexpr double kIndexLimit = 4e18;
  if (!lo_inf) {
    double x = std::ceil((window.lo - off) / h);
    if (std::abs(x) > kIndexLimit) throw Unsupported("lattice window too far from the origin");
    n_lo = static_cast<long long>(x);
    while (loc(n_lo) < window.lo) ++n_lo;
    while (loc(n_lo - 1) >= window.lo) --n_lo;
  }
  if (!hi_inf) {
    double x = std::floor((window.hi - off) / h);
    if (std::abs(x) > kIndexLimit) throw Unsupported("lattice window too far from the origin");
    n_hi = static_cast<long long>(x);
    while (loc(n_hi) >= window.hi) --n_hi;
    while (loc(n_hi + 1) < window.hi) ++n_hi;
  }

  Complex direct{};
  double direct_abs = 0.0;
  std::size_t direct_count = 0;
  auto add_range = [&](long long a, long long b) {
    if (b - a > 100000000LL) throw Unsupported("lattice window holds too many atoms for direct summation");
    for (long long n = a; n <= b; ++n) {
      Complex v = term(n);
      direct += v;
      direct_abs += std::abs(v);
      ++direct_count;
    }
  };
  double extra_error = 0.0;
  Complex tails{};

  if (!lo_inf && !hi_inf) {
    add_range(n_lo, n_hi);
  } else if (f.is_zero()) {
    return Integral{{}, 0.0, IntegrationMethod::LatticeSum, false};
  } else if (f.rapidly_decaying()) {
    double g = std::max(L.weight_growth, 0.0);
    double target = std::min(1e-17, 1e-6 * opt.rel_tol) * std::max(f.bound(), 1e-300);
    double R = std::max(1.0, f.truncation_radius(g, target)) + 2.0 * h;
    long long lim_lo = static_cast<long long>(std::floor((-R - off) / h));
    long long lim_hi = static_cast<long long>(std::ceil((R - off) / h));
    long long a = lo_inf ? lim_lo : std::max(n_lo, lim_lo);
    long long b = hi_inf ? lim_hi : std::min(n_hi, lim_hi);
    if (a <= b) add_range(a, b);
    // Sum beyond R dominated by the integral from R - h, scaled by 1/h.
    extra_error += 2.0 * L.weight * std::pow(2.0, g) * f.truncation_error(R - h, g) / h;
  } else {
    for (const auto& t : f.tail()) {
      double net = t.decay - L.weight_growth;
      double theta = std::remainder(t.frequency * h, 2.0 * kPi);
      if (net <= 0.0 || (net <= 1.0 && std::abs(theta) < 1e-12))
        return divergent_integral(IntegrationMethod::LatticeSum);
    }
    long long M0 = std::max<long long>(256, static_cast<long long>(std::ceil((f.tail_radius() + std::abs(off)) / h)) + 2);
    long long n_start = hi_inf ? (lo_inf ? M0 : std::max(M0, n_lo)) : 0;
    long long m_start = lo_inf ? (hi_inf ? M0 : std::max(M0, -n_hi)) : 0;
    long long a = lo_inf ? -m_start + 1 : n_lo;
    long long b = hi_inf ? n_start - 1 : n_hi;
    if (a <= b) add_range(a, b);
    for (const auto& t : f.tail()) {
      auto shape = t.shape;
      Complex phase = t.coef * std::polar(1.0, t.frequency * off);
      if (hi_inf) {
        auto H = [&, shape](double x) {
          double u = off + x * h;
          return shape(u) * L.weight_at(u);
        };
        auto r = quad::lattice_tail(H, t.frequency * h, n_start, opt.rel_tol);
        tails += phase * r.value;
        extra_error += std::abs(phase) * r.error;
      }
      if (lo_inf) {
        auto H = [&, shape](double x) {
          double u = off - x * h;
          return shape(u) * L.weight_at(u);
        };
        auto r = quad::lattice_tail(H, -t.frequency * h, m_start, opt.rel_tol);
        tails += phase * r.value;
        extra_error += std::abs(phase) * r.error;
      }
    }
  }
  double rounding = 4.0 * kEps * static_cast<double>(direct_count + 1) * direct_abs;
  return Integral{direct + tails, rounding + extra_error, IntegrationMethod::LatticeSum, false};
}

class IfsIntegrator {
 public:
  IfsIntegrator(const SelfSimilar& s, const FreqFunction& f, const Interval& window, double rel_tol)
      : s_(s), f_(f), window_(window), rel_tol_(rel_tol), hull_(s.hull()), center_(s.barycenter()) {}

  Integral run() {
    // Reference scale: ∫|f| dμ from a fixed-depth sweep.
    scale_ = 0.0;
    sweep(1.0, 0.0, 1.0, 0, 6);
    if (scale_ == 0.0) scale_ = 1e-300;
    Complex v = cell(1.0, 0.0, 1.0, 0);
    return Integral{s_.mass * v, s_.mass * error_, IntegrationMethod::IfsRecursion, false};
  }

 private:
  void sweep(double r, double b, double p, int depth, int max_depth) {
    if (depth == max_depth) {
      scale_ += p * std::abs(f_(r * center_ + b));
      return;
    }
    for (std::size_t i = 0; i < s_.ratios.size(); ++i)
      sweep(r * s_.ratios[i], r * s_.offsets[i] + b, p * s_.probabilities[i], depth + 1, max_depth);
  }

  // Cell S_w with S_w(x) = r x + b and probability p.
  Complex cell(double r, double b, double p, int depth) {
    double lo = r * hull_.lo + b;
    double hi = r * hull_.hi + b;
    if (hi < window_.lo || lo >= window_.hi) return {};
    bool inside = lo >= window_.lo && hi < window_.hi;
    double x = r * center_ + b;
    if (!inside) {
      if (depth >= s_.depth) {
        if (!window_.contains(x)) return {};
        Complex v = p * f_(x);
        error_ += std::abs(v);
        return v;
      }
      return children(r, b, p, depth);
    }
    Complex coarse = p * f_(x);
    Complex fine{};
    for (std::size_t i = 0; i < s_.ratios.size(); ++i) {
      double pi = p * s_.probabilities[i];
      fine += pi * f_(r * (s_.ratios[i] * center_ + s_.offsets[i]) + b);
    }
    double diff = std::abs(fine - coarse);
    if (depth >= 2 && (diff <= rel_tol_ * p * scale_ || depth >= s_.depth)) {
      error_ += diff;
      return fine;
    }
    return children(r, b, p, depth);
  }

  Complex children(double r, double b, double p, int depth) {
    Complex sum{};
    for (std::size_t i = 0; i < s_.ratios.size(); ++i)
      sum += cell(r * s_.ratios[i], r * s_.offsets[i] + b, p * s_.probabilities[i], depth + 1);
    return sum;
  }

  const SelfSimilar& s_;
  const FreqFunction& f_;
  Interval window_;
  double rel_tol_;
  Interval hull_;
  double center_;
  double scale_ = 0.0;
  double error_ = 0.0;
};

}  // namespace

Integral integrate(const SpectralMeasure& sigma, const FreqFunction& f, const Interval& window,
                   const IntegrationOptions& options) {
  if (window.empty() || f.is_zero() || sigma.is_zero()) return Integral{};
  switch (sigma.kind()) {
    case MeasureKind::Density: return integrate_density(sigma.as_density(), f, window, options);
    case MeasureKind::Atomic: {
      const Atomic& a = sigma.as_atomic();
      if (a.lattice) return integrate_lattice(*a.lattice, f, window, options);
      return integrate_atoms(a.atoms, f, window);
    }
    case MeasureKind::SelfSimilarIFS:
      return IfsIntegrator(sigma.as_self_similar(), f, window, options.rel_tol).run();
    case MeasureKind::Mixture: {
      Integral total;
      double dominant = -1.0;
      for (const auto& c : sigma.components()) {
        Integral part = integrate(*c.measure, f, window, options);
        if (part.divergent) return part;
        total.value += c.coefficient * part.value;
        total.error_bound += c.coefficient * part.error_bound;
        double size = c.coefficient * std::abs(part.value);
        if (size > dominant) {
          dominant = size;
          total.method = part.method;
        }
      }
      return total;
    }
    case MeasureKind::Shifted: {
      const Shift& s = sigma.as_shift();
      return integrate(*s.base, f.shifted(s.offset), window.shifted(-s.offset), options);
    }
  }
  throw Unsupported("unknown measure kind");
}

RealIntegral moment_integral(const SpectralMeasure& sigma, int p, const Interval& window,
                             const IntegrationOptions& options) {
  if (p < 0) throw InvalidArgument("moment order must be nonnegative");
  Integral r = integrate(sigma, moment_weight(p), window, options);
  if (r.divergent) return RealIntegral{kInfinity, kInfinity, r.method};
  return RealIntegral{std::max(0.0, r.value.real()), r.error_bound, r.method};
}

GrowthOrder certify_class_C(const SpectralMeasure& sigma, int p_max) {
  GrowthOrder g = sigma.growth_order();
  if (g.in_class && g.p > p_max) {
    g.in_class = false;
    g.reason = "growth order " + std::to_string(g.p) + " exceeds p_max " + std::to_string(p_max);
  }
  return g;
}

ClassCbCertificate certify_class_Cb(const SpectralMeasure& sigma) {
  ClassCbCertificate c;
  if (sigma.is_zero()) {
    c.in_class = true;
    return c;
  }
  Interval h = sigma.hull();
  if (!h.bounded() || !sigma.finite_mass() || !sigma.growth_order().in_class) {
    c.reason = "no certificate";
    return c;
  }
  c.in_class = true;
  c.radius = std::max(std::abs(h.lo), std::abs(h.hi));
  c.mass = moment_integral(sigma, 0).value;
  return c;
}

}  // namespace spectral

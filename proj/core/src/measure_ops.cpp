#include <algorithm>
#include <cmath>
#include <numbers>

#include "canonical.hpp"
#include "spectral/errors.hpp"
#include "spectral/measure.hpp"
#include "spectral/quadrature.hpp"

namespace spectral {
namespace detail {
namespace {

constexpr double kRelTol = 1e-12;

bool close(double a, double b, double scale = 1.0) { return std::abs(a - b) <= kRelTol * std::max(scale, 1.0); }

void add_parts(CanonicalParts& out, const SpectralMeasure& m, double coef, double shift) {
  if (coef == 0.0 || m.is_zero()) return;
  switch (m.kind()) {
    case MeasureKind::Density:
      out.densities.push_back(scale_density(shift_density(m.as_density(), shift), coef));
      return;
    case MeasureKind::Atomic: {
      const Atomic& a = m.as_atomic();
      if (a.lattice) {
        Lattice l = *a.lattice;
        l.offset += shift;
        l.weight_center += shift;
        l.weight *= coef;
        out.lattices.push_back(l);
      } else {
        for (const auto& atom : a.atoms) out.atoms[atom.location + shift] += coef * atom.weight;
      }
      return;
    }
    case MeasureKind::SelfSimilarIFS: {
      SelfSimilar s = m.as_self_similar();
      for (std::size_t i = 0; i < s.ratios.size(); ++i) s.offsets[i] += shift * (1.0 - s.ratios[i]);
      s.mass *= coef;
      out.ifs.push_back(s);
      return;
    }
    case MeasureKind::Mixture:
      for (const auto& c : m.components()) add_parts(out, *c.measure, coef * c.coefficient, shift);
      return;
    case MeasureKind::Shifted:
      add_parts(out, *m.as_shift().base, coef, shift + m.as_shift().offset);
      return;
  }
}

}  // namespace

CanonicalParts canonicalize(const SpectralMeasure& m) {
  CanonicalParts out;
  add_parts(out, m, 1.0, 0.0);
  return out;
}

SpectralMeasure assemble(const CanonicalParts& parts) {
  std::vector<std::pair<double, SpectralMeasure>> comps;
  for (const auto& d : parts.densities) comps.emplace_back(1.0, SpectralMeasure::density(d));
  if (!parts.atoms.empty()) {
    std::vector<Atom> atoms;
    for (const auto& [x, w] : parts.atoms) atoms.push_back({x, w});
    comps.emplace_back(1.0, SpectralMeasure::atoms(std::move(atoms)));
  }
  for (const auto& l : parts.lattices) comps.emplace_back(1.0, SpectralMeasure::lattice(l));
  for (const auto& s : parts.ifs) comps.emplace_back(1.0, SpectralMeasure::self_similar(s));
  if (comps.size() == 1) return comps.front().second;
  return SpectralMeasure::mixture(std::move(comps));
}

Density shift_density(const Density& d, double a) {
  if (a == 0.0) return d;
  Density out = d;
  auto fn = d.fn;
  out.fn = [fn, a](double u) { return fn(u - a); };
  out.expression.clear();
  out.support = d.support.shifted(a);
  for (auto& s : out.singularities) s.location += a;
  if (d.factors)
    out.factors = std::make_shared<const ConvolutionFactors>(
        ConvolutionFactors{SpectralMeasure::shifted(d.factors->a, a), d.factors->b});
  return out;
}

Density scale_density(const Density& d, double c) {
  if (c == 1.0) return d;
  Density out = d;
  auto fn = d.fn;
  out.fn = [fn, c](double u) { return c * fn(u); };
  out.expression.clear();
  if (d.factors)
    out.factors = std::make_shared<const ConvolutionFactors>(
        ConvolutionFactors{SpectralMeasure::mixture({{c, d.factors->a}}), d.factors->b});
  return out;
}

Density restrict_density(const Density& d, const Interval& I) {
  Density out = d;
  out.support = d.support.intersect(I);
  std::erase_if(out.singularities, [&](const Singularity& s) {
    return s.location < out.support.lo || s.location > out.support.hi;
  });
  if (!(d.support.lo == out.support.lo && d.support.hi == out.support.hi)) out.factors.reset();
  return out;
}

std::vector<Interval> support_union(const std::vector<Density>& ds) {
  std::vector<Interval> v;
  for (const auto& d : ds)
    if (!d.support.empty()) v.push_back(d.support);
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& I : v) {
    if (!out.empty() && I.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, I.hi);
    else
      out.push_back(I);
  }
  return out;
}

std::vector<Interval> complement_within(const std::vector<Interval>& pieces, const Interval& I) {
  std::vector<Interval> out;
  double cursor = I.lo;
  for (const auto& p : pieces) {
    if (p.lo > cursor) out.push_back(Interval{cursor, std::min(p.lo, I.hi)}.intersect(I));
    cursor = std::max(cursor, p.hi);
  }
  if (cursor < I.hi) out.push_back({cursor, I.hi});
  std::erase_if(out, [](const Interval& x) { return x.empty(); });
  return out;
}

bool same_points(const Lattice& a, const Lattice& b) {
  if (!close(a.spacing, b.spacing, a.spacing)) return false;
  double k = (a.offset - b.offset) / a.spacing;
  return std::abs(k - std::round(k)) < 1e-9;
}

bool on_lattice(const Lattice& l, double x) {
  double k = (x - l.offset) / l.spacing;
  return std::abs(k - std::round(k)) < 1e-9;
}

IfsRelation relate(const SelfSimilar& a, const SelfSimilar& b) {
  Interval ha = a.hull(), hb = b.hull();
  if (ha.hi < hb.lo || hb.hi < ha.lo) return IfsRelation::Singular;
  if (a.ratios.size() != b.ratios.size()) return IfsRelation::Unknown;
  double scale = std::max(std::abs(ha.lo), std::abs(ha.hi));
  for (std::size_t i = 0; i < a.ratios.size(); ++i) {
    if (!close(a.ratios[i], b.ratios[i]) || !close(a.offsets[i], b.offsets[i], scale)) return IfsRelation::Unknown;
  }
  bool same_probs = true;
  for (std::size_t i = 0; i < a.ratios.size(); ++i) same_probs = same_probs && close(a.probabilities[i], b.probabilities[i]);
  if (same_probs) return IfsRelation::Identical;
  // Distinct Bernoulli weights on a strongly separated IFS give mutually
  // singular measures (symbol frequencies differ almost surely).
  std::vector<Interval> images;
  for (std::size_t i = 0; i < a.ratios.size(); ++i)
    images.push_back({a.ratios[i] * ha.lo + a.offsets[i], a.ratios[i] * ha.hi + a.offsets[i]});
  std::sort(images.begin(), images.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (std::size_t i = 0; i + 1 < images.size(); ++i)
    if (!(images[i].hi < images[i + 1].lo)) return IfsRelation::Unknown;
  return IfsRelation::Singular;
}

bool lebesgue_null(const SelfSimilar& s) {
  double total = 0.0;
  for (double r : s.ratios) total += r;
  return total < 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Convolution

namespace {

using detail::CanonicalParts;

constexpr double kInf = kInfinity;

/// m(u) = ∫ a(u - v) b(v) dv by direct quadrature.
double convolution_value(const Density& a, const Density& b, double u) {
  Interval dom = b.support.intersect(Interval{u - a.support.hi, u - a.support.lo});
  if (dom.empty()) return 0.0;
  auto integrand = [&](double v) -> quad::Complex {
    double x = u - v;
    if (!a.support.contains(x)) return {};
    double bv = b.fn(v);
    if (bv == 0.0) return {};
    return {a.fn(x) * bv, 0.0};
  };
  std::vector<double> points;
  std::vector<double> singular;
  for (const auto& s : b.singularities) {
    points.push_back(s.location);
    if (s.exponent < 0.0) singular.push_back(s.location);
  }
  for (const auto& s : a.singularities) {
    points.push_back(u - s.location);
    if (s.exponent < 0.0) singular.push_back(u - s.location);
  }
  double lo = dom.lo, hi = dom.hi;
  double total = 0.0;
  double T = 1.0;
  for (double p : points) T = std::max(T, std::abs(p) + 1.0);
  if (std::isinf(hi)) {
    double start = std::isfinite(lo) ? std::max(lo, T) : T;
    total += quad::oscillatory_tail(integrand, 0.0, start, 1e-10).value.real();
    hi = start;
  }
  if (std::isinf(lo)) {
    double start = std::isfinite(hi) ? std::max(-hi, T) : T;
    total += quad::oscillatory_tail([&](double x) { return integrand(-x); }, 0.0, start, 1e-10).value.real();
    lo = -start;
  }
  if (!(lo < hi)) return total;
  points.push_back(lo);
  points.push_back(hi);
  std::erase_if(points, [&](double x) { return !(x >= lo && x <= hi); });
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto is_singular = [&](double x) { return std::find(singular.begin(), singular.end(), x) != singular.end(); };
  std::vector<std::pair<double, double>> smooth;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double x0 = points[i], x1 = points[i + 1];
    if (is_singular(x0) || is_singular(x1))
      total += quad::tanh_sinh(integrand, x0, x1, 1e-10).value.real();
    else
      smooth.emplace_back(x0, x1);
  }
  if (!smooth.empty()) total += quad::adaptive_gauss_kronrod(integrand, smooth, 1e-10, 0.0).value.real();
  return std::max(total, 0.0);
}

/// Tail exponent of a density treating compact support as rapid decay.
double effective_tail(const Density& d) { return d.support.bounded() ? -kInf : d.tail_exponent; }

bool opposite_unbounded(const Density& a, const Density& b) {
  return (std::isinf(a.support.lo) && std::isinf(b.support.hi)) || (std::isinf(a.support.hi) && std::isinf(b.support.lo));
}

SpectralMeasure convolve_densities(const SpectralMeasure& ma, const SpectralMeasure& mb) {
  const Density& a = ma.as_density();
  const Density& b = mb.as_density();
  double ta = effective_tail(a), tb = effective_tail(b);
  bool compact = a.support.bounded() || b.support.bounded();
  bool integrable = ta + tb < -1.0;
  if (!compact && opposite_unbounded(a, b) && !integrable) {
    if (a.tail_exact && b.tail_exact && ta + tb >= -1.0)
      throw NotAMeasure("convolution of " + ma.describe() + " and " + mb.describe() +
                        " diverges: both factors have infinite mass with non-decaying tails");
    throw Unsupported("convolution of " + ma.describe() + " and " + mb.describe() +
                      " has no integrability certificate");
  }
  Density out;
  out.fn = [a, b](double u) { return convolution_value(a, b, u); };
  out.support = Interval{a.support.lo + b.support.lo, a.support.hi + b.support.hi};
  if (compact)
    out.tail_exponent = std::max(ta, tb);
  else
    out.tail_exponent = std::max({ta, tb, ta + tb + 1.0});
  out.certification = (a.certification == Certification::Numeric || b.certification == Certification::Numeric)
                          ? Certification::Numeric
                          : Certification::Analytic;
  for (const auto& sa : a.singularities)
    for (const auto& sb : b.singularities)
      if (sa.exponent < 0.0 && sb.exponent < 0.0 && sa.exponent + sb.exponent + 1.0 < 0.0)
        out.singularities.push_back({sa.location + sb.location, sa.exponent + sb.exponent + 1.0});
  std::sort(out.singularities.begin(), out.singularities.end(),
            [](const Singularity& x, const Singularity& y) { return x.location < y.location; });
  out.singularities.erase(std::unique(out.singularities.begin(), out.singularities.end(),
                                      [](const Singularity& x, const Singularity& y) { return x.location == y.location; }),
                          out.singularities.end());
  out.factors = std::make_shared<const ConvolutionFactors>(ConvolutionFactors{ma, mb});
  return SpectralMeasure::density(std::move(out));
}

SpectralMeasure convolve_with_atoms(const std::vector<Atom>& atoms, const SpectralMeasure& other) {
  std::vector<std::pair<double, SpectralMeasure>> comps;
  for (const auto& a : atoms) comps.emplace_back(a.weight, SpectralMeasure::shifted(other, a.location));
  if (comps.size() == 1 && comps.front().first == 1.0) return comps.front().second;
  return SpectralMeasure::mixture(std::move(comps));
}

}  // namespace

SpectralMeasure convolve(const SpectralMeasure& a, const SpectralMeasure& b) {
  if (a.is_zero() || b.is_zero()) return SpectralMeasure::zero();
  if (a.kind() == MeasureKind::Mixture) {
    std::vector<std::pair<double, SpectralMeasure>> comps;
    for (const auto& c : a.components()) comps.emplace_back(c.coefficient, convolve(*c.measure, b));
    return SpectralMeasure::mixture(std::move(comps));
  }
  if (b.kind() == MeasureKind::Mixture) {
    std::vector<std::pair<double, SpectralMeasure>> comps;
    for (const auto& c : b.components()) comps.emplace_back(c.coefficient, convolve(a, *c.measure));
    return SpectralMeasure::mixture(std::move(comps));
  }
  if (a.kind() == MeasureKind::Shifted)
    return SpectralMeasure::shifted(convolve(*a.as_shift().base, b), a.as_shift().offset);
  if (b.kind() == MeasureKind::Shifted)
    return SpectralMeasure::shifted(convolve(a, *b.as_shift().base), b.as_shift().offset);

  bool a_atoms = a.kind() == MeasureKind::Atomic && !a.as_atomic().lattice;
  bool b_atoms = b.kind() == MeasureKind::Atomic && !b.as_atomic().lattice;
  if (a_atoms && b_atoms) {
    std::vector<Atom> out;
    for (const auto& x : a.as_atomic().atoms)
      for (const auto& y : b.as_atomic().atoms) out.push_back({x.location + y.location, x.weight * y.weight});
    return SpectralMeasure::atoms(std::move(out));
  }
  if (a_atoms) return convolve_with_atoms(a.as_atomic().atoms, b);
  if (b_atoms) return convolve_with_atoms(b.as_atomic().atoms, a);
  if (a.kind() == MeasureKind::Density && b.kind() == MeasureKind::Density) return convolve_densities(a, b);
  throw Unsupported("no convolution rule for " + a.describe() + " and " + b.describe());
}

// ---------------------------------------------------------------------------
// Lebesgue decomposition

Decomposition lebesgue_decompose(const SpectralMeasure& a, const SpectralMeasure& b) {
  using detail::IfsRelation;
  CanonicalParts A = detail::canonicalize(a);
  CanonicalParts B = detail::canonicalize(b);
  CanonicalParts ac, sing;

  std::vector<Interval> b_support = detail::support_union(B.densities);
  for (const auto& d : A.densities) {
    for (const auto& I : b_support) {
      Interval piece = d.support.intersect(I);
      if (!piece.empty()) ac.densities.push_back(detail::restrict_density(d, piece));
    }
    for (const auto& gap : detail::complement_within(b_support, d.support))
      sing.densities.push_back(detail::restrict_density(d, gap));
  }

  auto b_point_weight = [&](double x) {
    double w = 0.0;
    if (auto it = B.atoms.find(x); it != B.atoms.end()) w += it->second;
    for (const auto& l : B.lattices)
      if (detail::on_lattice(l, x)) w += l.weight_at(x);
    return w;
  };
  for (const auto& [x, w] : A.atoms) (b_point_weight(x) > 0.0 ? ac : sing).atoms[x] += w;

  for (const auto& l : A.lattices) {
    bool matched = false;
    for (const auto& m : B.lattices) {
      if (detail::same_points(l, m)) {
        matched = true;
      } else if (!detail::close(l.spacing, m.spacing, l.spacing)) {
        throw Unsupported("lattices with different spacings have no decomposition rule");
      }
    }
    if (!matched) {
      for (const auto& [x, w] : B.atoms)
        if (detail::on_lattice(l, x))
          throw Unsupported("the singular part of a lattice against finitely many of its atoms is not representable");
    }
    (matched ? ac : sing).lattices.push_back(l);
  }

  for (const auto& s : A.ifs) {
    bool identical = false;
    for (const auto& t : B.ifs) {
      IfsRelation r = detail::relate(s, t);
      if (r == IfsRelation::Identical) identical = true;
      if (r == IfsRelation::Unknown) throw Unsupported("no decomposition rule for these self-similar measures");
    }
    if (!identical && !B.densities.empty() && !detail::lebesgue_null(s))
      throw Unsupported("self-similar measure with similarity dimension 1 against a density");
    (identical ? ac : sing).ifs.push_back(s);
  }

  auto rn = [A, B, ac](double u) -> double {
    if (auto it = ac.atoms.find(u); it != ac.atoms.end()) {
      double w = 0.0;
      if (auto jt = B.atoms.find(u); jt != B.atoms.end()) w += jt->second;
      for (const auto& l : B.lattices)
        if (detail::on_lattice(l, u)) w += l.weight_at(u);
      return w > 0.0 ? it->second / w : 0.0;
    }
    double num = 0.0, den = 0.0;
    for (const auto& l : ac.lattices)
      if (detail::on_lattice(l, u)) num += l.weight_at(u);
    if (num > 0.0) {
      for (const auto& l : B.lattices)
        if (detail::on_lattice(l, u)) den += l.weight_at(u);
      if (auto jt = B.atoms.find(u); jt != B.atoms.end()) den += jt->second;
      return den > 0.0 ? num / den : 0.0;
    }
    for (const auto& s : ac.ifs) {
      Interval h = s.hull();
      if (u >= h.lo && u <= h.hi) {
        num += s.mass;
        for (const auto& t : B.ifs)
          if (detail::relate(s, t) == detail::IfsRelation::Identical) den += t.mass;
        return den > 0.0 ? num / den : 0.0;
      }
    }
    for (const auto& d : ac.densities)
      if (d.support.contains(u)) num += d.fn(u);
    for (const auto& d : B.densities)
      if (d.support.contains(u)) den += d.fn(u);
    return den > 0.0 ? num / den : 0.0;
  };

  return Decomposition{detail::assemble(ac), detail::assemble(sing), rn};
}

}  // namespace spectral

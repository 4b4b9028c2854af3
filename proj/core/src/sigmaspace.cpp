#include "spectral/sigmaspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "canonical.hpp"
#include "parallel.hpp"
#include "spectral/errors.hpp"
#include "spectral/expr.hpp"
#include "spectral/rng.hpp"

namespace spectral {
namespace {

using detail::CanonicalParts;

constexpr std::size_t kSampleBlock = 4096;

double density_sum(const std::vector<Density>& ds, double u) {
  double m = 0.0;
  for (const auto& d : ds)
    if (d.support.contains(u)) m += d.fn(u);
  return m;
}

double max_tail(const std::vector<Density>& ds) {
  double t = -kInfinity;
  for (const auto& d : ds)
    if (!d.support.bounded()) t = std::max(t, d.tail_exponent);
  return t;
}

/// √(M₁ M₂) for the density parts, or nullopt when the supports miss.
std::optional<SpectralMeasure> geometric_mean_density(const std::vector<Density>& a, const std::vector<Density>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::vector<Interval> ua = detail::support_union(a), ub = detail::support_union(b);
  Interval overlap{std::max(ua.front().lo, ub.front().lo), std::min(ua.back().hi, ub.back().hi)};
  if (overlap.empty()) return std::nullopt;
  Density d;
  d.fn = [a, b](double u) { return std::sqrt(density_sum(a, u) * density_sum(b, u)); };
  d.support = overlap;
  double ta = max_tail(a), tb = max_tail(b);
  d.tail_exponent = overlap.bounded() ? -kInfinity : 0.5 * (ta + tb);
  d.certification = Certification::Analytic;
  for (const auto* side : {&a, &b}) {
    for (const auto& part : *side) {
      if (part.certification == Certification::Numeric) d.certification = Certification::Numeric;
      for (const auto& s : part.singularities)
        if (s.location >= overlap.lo && s.location <= overlap.hi) d.singularities.push_back({s.location, 0.5 * s.exponent});
      for (double e : {part.support.lo, part.support.hi})
        if (e > overlap.lo && e < overlap.hi) d.singularities.push_back({e, 0.0});
    }
  }
  return SpectralMeasure::density(std::move(d));
}

double point_weight(const CanonicalParts& P, double x) {
  double w = 0.0;
  if (auto it = P.atoms.find(x); it != P.atoms.end()) w += it->second;
  for (const auto& l : P.lattices)
    if (detail::on_lattice(l, x)) w += l.weight_at(x);
  return w;
}

void check_ifs_against_densities(const CanonicalParts& A, const CanonicalParts& B) {
  if (B.densities.empty()) return;
  for (const auto& s : A.ifs)
    if (!detail::lebesgue_null(s))
      throw Unsupported("self-similar measure with similarity dimension 1 against a density");
}

/// Lattices of A and B sharing their points, with the combined weight
/// √(w₁ w₂) as a lattice.
std::vector<Lattice> matched_lattices(const CanonicalParts& A, const CanonicalParts& B) {
  std::vector<Lattice> out;
  for (const auto& l : A.lattices) {
    int matches = 0;
    for (const auto& m : B.lattices) {
      if (!detail::same_points(l, m)) {
        if (std::abs(l.spacing - m.spacing) > 1e-12 * l.spacing)
          throw Unsupported("lattices with different spacings have no inner-product rule");
        continue;
      }
      if (++matches > 1) throw Unsupported("several lattices on the same points");
      if (l.weight_growth != 0.0 && m.weight_growth != 0.0 && l.weight_center != m.weight_center)
        throw Unsupported("lattice weights with different growth centers");
      Lattice c = l;
      c.weight = std::sqrt(l.weight * m.weight);
      c.weight_growth = 0.5 * (l.weight_growth + m.weight_growth);
      c.weight_center = l.weight_growth != 0.0 ? l.weight_center : m.weight_center;
      out.push_back(c);
    }
  }
  for (const auto& m : B.lattices) {
    int matches = 0;
    for (const auto& l : A.lattices)
      if (detail::same_points(l, m) && ++matches > 1) throw Unsupported("several lattices on the same points");
  }
  return out;
}

/// Identical IFS pairs (a, b), or Unsupported when the relation is unknown.
std::vector<std::pair<SelfSimilar, SelfSimilar>> matched_ifs(const CanonicalParts& A, const CanonicalParts& B) {
  std::vector<std::pair<SelfSimilar, SelfSimilar>> out;
  for (const auto& s : A.ifs) {
    int matches = 0;
    for (const auto& t : B.ifs) {
      detail::IfsRelation r = detail::relate(s, t);
      if (r == detail::IfsRelation::Unknown) throw Unsupported("no inner-product rule for these self-similar measures");
      if (r == detail::IfsRelation::Identical) {
        if (++matches > 1) throw Unsupported("several identical self-similar components");
        out.emplace_back(s, t);
      }
    }
  }
  for (const auto& t : B.ifs) {
    int matches = 0;
    for (const auto& s : A.ifs)
      if (detail::relate(s, t) == detail::IfsRelation::Identical && ++matches > 1)
        throw Unsupported("several identical self-similar components");
  }
  return out;
}

/// Point masses (finite atoms and lattice points in `window`) keyed by
/// location with weights for both sides; nearby keys are merged.
using PointTable = std::map<double, std::pair<double, double>>;

void add_point(PointTable& t, double x, double w, int side) {
  auto it = t.lower_bound(x - 1e-9 * std::max(1.0, std::abs(x)));
  if (it == t.end() || std::abs(it->first - x) > 1e-9 * std::max(1.0, std::abs(x))) it = t.emplace(x, std::pair{0.0, 0.0}).first;
  (side == 0 ? it->second.first : it->second.second) += w;
}

void add_points(PointTable& t, const CanonicalParts& P, const Interval& window, int side) {
  for (const auto& [x, w] : P.atoms)
    if (window.contains(x)) add_point(t, x, w, side);
  for (const auto& l : P.lattices) {
    auto n0 = static_cast<long long>(std::ceil((window.lo - l.offset) / l.spacing));
    for (long long n = n0;; ++n) {
      double x = l.offset + static_cast<double>(n) * l.spacing;
      if (x >= window.hi) break;
      if (window.contains(x)) add_point(t, x, l.weight_at(x), side);
    }
  }
}

FreqFunction real_expression_function(const Expression& e) {
  Growth g = e.growth();
  if (g.kind == GrowthKind::SuperPolynomial || g.kind == GrowthKind::Unknown)
    throw InvalidArgument("sigma-function expression '" + e.source() + "' has no polynomial bound");
  double exponent = g.kind == GrowthKind::RapidDecay ? -4.0 : g.exponent;
  double bound = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    double u = i * 0.5;
    bound = std::max(bound, std::abs(e(u)) / std::pow(1.0 + std::abs(u), exponent));
  }
  return polynomial_function([e](double u) { return e(u); }, exponent, 2.0 * bound);
}

}  // namespace

SigmaFunction::SigmaFunction(FreqFunction f, SpectralMeasure sigma, std::string description)
    : f_(std::move(f)), sigma_(std::move(sigma)), description_(std::move(description)) {}

SigmaFunction SigmaFunction::from_expression(const std::string& expression, SpectralMeasure sigma) {
  return SigmaFunction(real_expression_function(Expression::parse(expression)), std::move(sigma), expression);
}

SigmaFunction SigmaFunction::from_atom_weights(std::vector<std::pair<double, Complex>> values, SpectralMeasure sigma) {
  std::vector<GaussianEnvelope> env;
  for (const auto& [x, v] : values) {
    if (!std::isfinite(x)) throw InvalidArgument("atom locations must be finite");
    if (v != Complex{}) env.push_back({std::abs(v), x, 1.0, 0.0});
  }
  auto fn = [values](double u) {
    for (const auto& [x, v] : values)
      if (u == x) return v;
    return Complex{};
  };
  return SigmaFunction(FreqFunction::rapid(fn, std::move(env)), std::move(sigma), "atom table");
}

SigmaFunction SigmaFunction::from_test_function(const TestFunction& psi, SpectralMeasure sigma) {
  return SigmaFunction(psi.fourier_transform(), std::move(sigma), "test function transform");
}

double SigmaFunction::norm_sq() const { return std::max(0.0, inner_product(*this, *this).real()); }

Complex inner_product(const SigmaFunction& a, const SigmaFunction& b) {
  CanonicalParts A = detail::canonicalize(a.sigma());
  CanonicalParts B = detail::canonicalize(b.sigma());
  check_ifs_against_densities(A, B);
  check_ifs_against_densities(B, A);
  FreqFunction h = a.f() * b.f().conj();
  Complex sum{};

  if (auto dens = geometric_mean_density(A.densities, B.densities)) {
    Integral r = integrate(*dens, h);
    if (r.divergent) throw InvalidArgument("f₁ conj f₂ is not integrable against the common density");
    sum += r.value;
  }

  std::map<double, bool> points;
  for (const auto& [x, w] : A.atoms) points[x] = true;
  for (const auto& [x, w] : B.atoms) points[x] = true;
  for (const auto& [x, unused] : points) {
    double w1 = point_weight(A, x), w2 = point_weight(B, x);
    if (w1 > 0.0 && w2 > 0.0) sum += std::sqrt(w1 * w2) * a.f()(x) * std::conj(b.f()(x));
  }

  for (const auto& l : matched_lattices(A, B)) {
    Integral r = integrate(SpectralMeasure::lattice(l), h);
    if (r.divergent) throw InvalidArgument("f₁ conj f₂ is not summable over the common lattice");
    sum += r.value;
    for (const auto& [x, unused] : points)
      if (detail::on_lattice(l, x)) sum -= l.weight_at(x) * h(x);
  }

  for (const auto& [s, t] : matched_ifs(A, B)) {
    SelfSimilar c = s;
    c.mass = std::sqrt(s.mass * t.mass);
    sum += integrate(SpectralMeasure::self_similar(c), h).value;
  }
  return sum;
}

bool mutually_singular(const SpectralMeasure& a, const SpectralMeasure& b) {
  if (a.is_zero() || b.is_zero()) return true;
  return lebesgue_decompose(a, b).ac.is_zero() && lebesgue_decompose(b, a).ac.is_zero();
}

Complex process_correlation(const SpectralMeasure& sigma1, const TestFunction& f, const SpectralMeasure& sigma2,
                            const TestFunction& g) {
  return inner_product(SigmaFunction::from_test_function(f, sigma1), SigmaFunction::from_test_function(g, sigma2));
}

bool equiv_check(const SigmaFunction& a, const SigmaFunction& b) {
  double na = inner_product(a, a).real();
  double nb = inner_product(b, b).real();
  double cross = inner_product(a, b).real();
  double dist = na - 2.0 * cross + nb;
  return dist <= 1e-9 * (na + nb);
}

CommonGridCorrelation common_grid_correlation(const SpectralMeasure& sigma1, const TestFunction& f,
                                              const SpectralMeasure& sigma2, const TestFunction& g, double u_max,
                                              std::size_t bins, std::size_t n_samples, std::uint64_t seed,
                                              unsigned workers) {
  if (bins < 1) throw InvalidArgument("the common grid needs at least one bin");
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw InvalidArgument("U_max must be positive and finite");
  if (n_samples < 2) throw InvalidArgument("need at least two samples");

  CommonGridCorrelation out;
  out.samples = n_samples;
  out.target = process_correlation(sigma1, f, sigma2, g);

  CanonicalParts A = detail::canonicalize(sigma1);
  CanonicalParts B = detail::canonicalize(sigma2);
  struct Cell {
    double u, v1, v2;
  };
  std::vector<Cell> cells;
  FreqFunction weight = moment_weight(1.0);
  FreqFunction first_moment =
      polynomial_function([](double u) { return u / (1.0 + u * u); }, -1.0, 1.0);
  auto add_binned = [&](const SpectralMeasure& m1, const SpectralMeasure& m2) {
    for (std::size_t j = 0; j < bins; ++j) {
      Interval bin{-u_max + 2.0 * u_max * static_cast<double>(j) / static_cast<double>(bins),
                   j + 1 == bins ? u_max : -u_max + 2.0 * u_max * static_cast<double>(j + 1) / static_cast<double>(bins)};
      double v1 = m1.is_zero() ? 0.0 : std::max(0.0, integrate(m1, weight, bin).value.real());
      double v2 = m2.is_zero() ? 0.0 : std::max(0.0, integrate(m2, weight, bin).value.real());
      if (v1 + v2 <= 0.0) continue;
      double c = (m1.is_zero() ? 0.0 : integrate(m1, first_moment, bin).value.real()) +
                 (m2.is_zero() ? 0.0 : integrate(m2, first_moment, bin).value.real());
      cells.push_back({std::clamp(c / (v1 + v2), bin.lo, bin.hi), v1, v2});
    }
  };

  CanonicalParts dA, dB;
  dA.densities = A.densities;
  dB.densities = B.densities;
  add_binned(dA.densities.empty() ? SpectralMeasure::zero() : detail::assemble(dA),
             dB.densities.empty() ? SpectralMeasure::zero() : detail::assemble(dB));

  auto matched = matched_ifs(A, B);
  auto is_matched = [&](const SelfSimilar& s, bool left) {
    for (const auto& [x, y] : matched)
      if (detail::relate(left ? x : y, s) == detail::IfsRelation::Identical) return true;
    return false;
  };
  for (const auto& [s, t] : matched) add_binned(SpectralMeasure::self_similar(s), SpectralMeasure::self_similar(t));
  for (const auto& s : A.ifs)
    if (!is_matched(s, true)) add_binned(SpectralMeasure::self_similar(s), SpectralMeasure::zero());
  for (const auto& t : B.ifs)
    if (!is_matched(t, false)) add_binned(SpectralMeasure::zero(), SpectralMeasure::self_similar(t));

  PointTable table;
  Interval window{-u_max, u_max};
  add_points(table, A, window, 0);
  add_points(table, B, window, 1);
  for (const auto& [x, w] : table) cells.push_back({x, w.first / (1.0 + x * x), w.second / (1.0 + x * x)});

  if (cells.size() >= (std::size_t{1} << 32)) throw SeedStreamExhausted("common grid has too many cells");
  out.cells = cells.size();

  FreqFunction fh = f.fourier_transform(), gh = g.fourier_transform();
  std::vector<Complex> c1(cells.size()), c2(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double lift = 1.0 + cells[c].u * cells[c].u;
    c1[c] = std::sqrt(0.5 * lift * cells[c].v1) * fh(cells[c].u);
    c2[c] = std::sqrt(0.5 * lift * cells[c].v2) * gh(cells[c].u);
    out.grid_target += 2.0 * c1[c] * std::conj(c2[c]);
  }

  struct Moments {
    double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
  };
  std::size_t n_blocks = (n_samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Moments> partial(n_blocks);
  detail::parallel_blocks(n_blocks, workers, [&](std::size_t blk) {
    Moments m;
    std::size_t last = std::min(n_samples, (blk + 1) * kSampleBlock);
    for (std::size_t i = blk * kSampleBlock; i < last; ++i) {
      Complex x1{}, x2{};
      for (std::size_t c = 0; c < cells.size(); ++c) {
        NormalPair z = normal_pair(seed, i, static_cast<std::uint32_t>(c), StreamTag::CommonGrid);
        Complex zc{z.a, z.b};
        x1 += c1[c] * zc;
        x2 += c2[c] * zc;
      }
      Complex p = x1 * std::conj(x2);
      m.re += p.real();
      m.im += p.imag();
      m.re2 += p.real() * p.real();
      m.im2 += p.imag() * p.imag();
    }
    partial[blk] = m;
  });
  Moments tot;
  for (const auto& m : partial) {
    tot.re += m.re;
    tot.im += m.im;
    tot.re2 += m.re2;
    tot.im2 += m.im2;
  }
  auto n = static_cast<double>(n_samples);
  out.estimate = {tot.re / n, tot.im / n};
  auto se = [n](double s, double s2) { return std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1.0)) / n); };
  out.std_error_re = se(tot.re, tot.re2);
  out.std_error_im = se(tot.im, tot.im2);
  auto z = [](double d, double s) { return s > 0.0 ? d / s : (d == 0.0 ? 0.0 : kInfinity); };
  out.z_re = z(out.estimate.real() - out.target.real(), out.std_error_re);
  out.z_im = z(out.estimate.imag() - out.target.imag(), out.std_error_im);
  out.consistent = std::abs(out.z_re) <= 4.0 && std::abs(out.z_im) <= 4.0;
  return out;
}

}  // namespace spectral

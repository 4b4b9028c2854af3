#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spectral/freq_function.hpp"

namespace spectral {

class SpectralMeasure;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Half-open interval [lo, hi); either end may be infinite.
struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;

  bool empty() const { return !(lo < hi); }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double u) const { return u >= lo && u < hi; }
  Interval intersect(const Interval& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
  Interval shifted(double a) const { return {lo + a, hi + a}; }
};

/// m(u) behaves like |u - location|^exponent near `location`. Negative
/// exponents must exceed -1; non-negative ones mark kinks.
struct Singularity {
  double location = 0.0;
  double exponent = 0.0;
};

enum class Certification { Analytic, Numeric };

struct ConvolutionFactors;

/// Nonnegative density m, positive almost everywhere on `support`.
struct Density {
  std::function<double(double)> fn;  ///< only evaluated inside `support`
  std::string expression;            ///< grammar source; empty for derived densities
  Interval support;
  /// m(u) = O(|u|^tail_exponent) as |u| -> inf; +inf when no polynomial
  /// bound is known, -inf for rapid decay.
  double tail_exponent = 0.0;
  /// Also m(u) >= c |u|^tail_exponent for large |u| on both unbounded sides.
  bool tail_exact = false;
  std::vector<Singularity> singularities;
  Certification certification = Certification::Analytic;
  std::shared_ptr<const ConvolutionFactors> factors;  ///< set for lazy convolutions
};

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Atoms at offset + n*spacing for all integers n, with weight
/// weight * (1 + (u - weight_center)^2)^(weight_growth/2) at location u.
struct Lattice {
  double spacing = 1.0;
  double offset = 0.0;
  double weight = 1.0;
  double weight_growth = 0.0;
  double weight_center = 0.0;

  double weight_at(double u) const {
    if (weight_growth == 0.0) return weight;
    double x = u - weight_center;
    return weight * std::pow(1.0 + x * x, 0.5 * weight_growth);
  }
};

/// Either a finite atom list or a lattice.
struct Atomic {
  std::vector<Atom> atoms;
  std::optional<Lattice> lattice;
};

/// Self-similar measure `mass * mu` where mu = Σ p_i mu∘S_i^{-1},
/// S_i(x) = ratios[i] * x + offsets[i].
struct SelfSimilar {
  std::vector<double> ratios;
  std::vector<double> offsets;
  std::vector<double> probabilities;
  double mass = 1.0;
  int depth = 24;  ///< maximal recursion depth for integration

  /// Smallest interval mapped into itself by every S_i.
  Interval hull() const;
  /// Mean of mu.
  double barycenter() const;
};

struct Component {
  double coefficient = 1.0;
  std::shared_ptr<const SpectralMeasure> measure;
};

struct Shift {
  std::shared_ptr<const SpectralMeasure> base;
  double offset = 0.0;
};

enum class MeasureKind { Density, Atomic, SelfSimilarIFS, Mixture, Shifted };

/// Least p with ∫ dσ/(1+u²)^p < ∞, as established at construction.
struct GrowthOrder {
  bool in_class = false;
  int p = 0;
  Certification certification = Certification::Analytic;
  std::string reason;
};

/// A positive measure on the real line. Immutable; copies share state.
class SpectralMeasure {
 public:
  static SpectralMeasure density(Density d);
  /// Density given by an expression over u. A missing tail exponent is
  /// derived from the expression, falling back to a numeric fit.
  static SpectralMeasure density(const std::string& expression, Interval support = {},
                                 std::optional<double> tail_exponent = std::nullopt,
                                 std::vector<Singularity> singularities = {});
  /// m ≡ value on `support`.
  static SpectralMeasure lebesgue(Interval support = {}, double value = 1.0);
  /// c_H |u|^{1-2H}, the spectral density of fractional Brownian motion.
  static SpectralMeasure fbm(double hurst);
  static SpectralMeasure atoms(std::vector<Atom> atoms);
  static SpectralMeasure dirac(double location = 0.0, double weight = 1.0);
  static SpectralMeasure lattice(Lattice l);
  /// Unit atoms at every integer.
  static SpectralMeasure comb();
  static SpectralMeasure self_similar(SelfSimilar s);
  /// Middle-thirds Cantor measure on [0, 1].
  static SpectralMeasure cantor(double mass = 1.0);
  static SpectralMeasure mixture(std::vector<std::pair<double, SpectralMeasure>> components);
  static SpectralMeasure shifted(const SpectralMeasure& base, double offset);
  static SpectralMeasure zero();

  MeasureKind kind() const;
  const Density& as_density() const;
  const Atomic& as_atomic() const;
  const SelfSimilar& as_self_similar() const;
  const std::vector<Component>& components() const;
  const Shift& as_shift() const;

  const GrowthOrder& growth_order() const;
  bool is_zero() const;
  /// Closed interval containing the support (may be infinite).
  Interval hull() const;
  /// The measure is carried by a compact set.
  bool compact_support() const { return hull().bounded(); }
  /// The measure has finitely many atoms and nothing else.
  bool finite_atomic() const;
  /// Total mass is finite (certified by kind rules, not by integration).
  bool finite_mass() const;

  /// Human-readable kind summary, e.g. "density(1)" or "lattice(h=1)".
  std::string describe() const;

 private:
  struct Node;
  explicit SpectralMeasure(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct ConvolutionFactors {
  SpectralMeasure a;
  SpectralMeasure b;
};

enum class IntegrationMethod { ClosedForm, Quadrature, LatticeSum, IfsRecursion };

std::string to_string(IntegrationMethod m);

struct IntegrationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct Integral {
  Complex value{};
  double error_bound = 0.0;
  IntegrationMethod method = IntegrationMethod::ClosedForm;
  bool divergent = false;
};

/// ∫_window f dσ. Atoms and IFS cells are assigned to the half-open window
/// by location. Divergent integrals return `divergent` with an infinite value.
Integral integrate(const SpectralMeasure& sigma, const FreqFunction& f, const Interval& window = {},
                   const IntegrationOptions& options = {});

struct RealIntegral {
  double value = 0.0;  ///< +inf when a divergence certificate fires
  double error_bound = 0.0;
  IntegrationMethod method = IntegrationMethod::ClosedForm;
};

/// ∫_window (1+u²)^{-p} dσ(u).
RealIntegral moment_integral(const SpectralMeasure& sigma, int p, const Interval& window = {},
                             const IntegrationOptions& options = {});

/// Least p <= p_max with a finite moment, or in_class = false with a reason.
GrowthOrder certify_class_C(const SpectralMeasure& sigma, int p_max = 8);

struct ClassCbCertificate {
  bool in_class = false;
  std::string reason;
  double radius = 0.0;  ///< support contained in [-radius, radius]
  double mass = 0.0;

  /// C_pq with q = p: ∫ dσ(u) (1+|u+v|²)^{-p} <= C_pq (1+v²)^{-p} for all v.
  double constant(int p) const { return std::pow(2.0 * (1.0 + radius * radius), p) * mass; }
};

/// Certificate-only membership in the class C_b (compactly supported measures).
ClassCbCertificate certify_class_Cb(const SpectralMeasure& sigma);

/// Throws NotAMeasure for pairs of infinite-mass measures with
/// non-decaying densities and Unsupported outside the implemented rules.
SpectralMeasure convolve(const SpectralMeasure& a, const SpectralMeasure& b);

struct Decomposition {
  SpectralMeasure ac;        ///< part of σ₁ absolutely continuous w.r.t. σ₂
  SpectralMeasure singular;  ///< part of σ₁ singular w.r.t. σ₂
  /// d(ac)/dσ₂, meaningful σ₂-almost everywhere on the support of `ac`.
  std::function<double(double)> rn_derivative;
};

Decomposition lebesgue_decompose(const SpectralMeasure& a, const SpectralMeasure& b);

}  // namespace spectral

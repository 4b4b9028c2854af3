#include "spectral/gproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "parallel.hpp"
#include "spectral/errors.hpp"
#include "spectral/rng.hpp"

namespace spectral {
namespace {

constexpr std::size_t kPathBlock = 256;

void require_synthesis_order(const SpectralMeasure& sigma) {
  const GrowthOrder& g = sigma.growth_order();
  if (!g.in_class) throw InvalidArgument("measure " + sigma.describe() + " is not certified in class C: " + g.reason);
  if (g.p > 1)
    throw InvalidArgument("measure " + sigma.describe() + " needs growth order p = " + std::to_string(g.p) +
                          "; the spectral synthesis requires ∫ dσ/(1+u²) < ∞");
}

FreqFunction odd_weight(int p) {
  auto f = [p](double u) { return u * std::pow(1.0 + u * u, -p - 1); };
  return polynomial_function(f, -2.0 * p - 1.0, 1.0);
}

FreqFunction centroid_weight(int p) {
  auto f = [p](double u) { return u * std::pow(1.0 + u * u, -p); };
  return polynomial_function(f, 1.0 - 2.0 * p, 1.0);
}

void check_grid_bins(const NormalFieldGrid& grid) {
  if (grid.bins() >= (std::size_t{1} << 32))
    throw SeedStreamExhausted("grid has more bins than the 32-bit substream slot can address");
}

}  // namespace

CovarianceValue pointwise_covariance(const SpectralMeasure& sigma, double t, double s,
                                     const IntegrationOptions& options) {
  require_synthesis_order(sigma);
  if (t == 0.0 || s == 0.0) return CovarianceValue{};
  FormValue v = sesquilinear_form(increment_kernel(t), increment_kernel(s), sigma, 1e-8, options);
  return CovarianceValue{v.value.real(), v.error_bound, v.method};
}

FreqFunction transform_of(const GramInput& input) {
  return std::visit([](const auto& x) { return x.fourier_transform(); }, input);
}

Eigen::MatrixXcd gram_matrix(const SpectralMeasure& sigma, const std::vector<GramInput>& inputs,
                             const IntegrationOptions& options) {
  std::size_t n = inputs.size();
  std::vector<FreqFunction> f;
  f.reserve(n);
  for (const auto& in : inputs) f.push_back(transform_of(in));
  Eigen::MatrixXcd G(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex v = sesquilinear_form(f[i], f[j], sigma, 1e-8, options).value;
      if (i == j) v = Complex{v.real(), 0.0};
      G(i, j) = v;
      G(j, i) = std::conj(v);
    }
  }
  return G;
}

std::string to_string(BinRule r) { return r == BinRule::EqualWidth ? "equal_width" : "equal_mass"; }

BinRule bin_rule_from_string(const std::string& s) {
  if (s == "equal_width") return BinRule::EqualWidth;
  if (s == "equal_mass") return BinRule::EqualMass;
  throw InvalidArgument("unknown bin rule '" + s + "' (expected equal_width or equal_mass)");
}

NormalFieldGrid build_grid(const SpectralMeasure& sigma, double u_max, std::size_t bins, BinRule rule, int p) {
  if (bins < 2) throw InvalidArgument("a normal-field grid needs at least two bins");
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw InvalidArgument("U_max must be positive and finite");
  if (p < 0) throw InvalidArgument("grid order p must be nonnegative");
  NormalFieldGrid g;
  g.p = p;
  g.u_max = u_max;
  g.rule = rule;
  g.measure = sigma.describe();
  RealIntegral total = moment_integral(sigma, p);
  if (std::isinf(total.value))
    throw InvalidArgument("∫ dσ/(1+u²)^" + std::to_string(p) + " diverges for " + sigma.describe());
  g.total_moment = total.value;
  g.truncation_mass = moment_integral(sigma, p, {-kInfinity, -u_max}).value +
                      moment_integral(sigma, p, {u_max, kInfinity}).value;

  g.edges.resize(bins + 1);
  g.edges.front() = -u_max;
  g.edges.back() = u_max;
  if (rule == BinRule::EqualWidth) {
    for (std::size_t j = 1; j < bins; ++j)
      g.edges[j] = -u_max + 2.0 * u_max * static_cast<double>(j) / static_cast<double>(bins);
  } else {
    double inside = moment_integral(sigma, p, {-u_max, u_max}).value;
    double target = inside / static_cast<double>(bins);
    for (std::size_t j = 1; j < bins; ++j) {
      double a = g.edges[j - 1];
      auto F = [&](double x) { return moment_integral(sigma, p, {a, x}).value - target; };
      if (F(u_max) <= 0.0) {
        g.edges[j] = u_max;
        continue;
      }
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      auto [x0, x1] = boost::math::tools::bisect(F, a, u_max, tol, iters);
      g.edges[j] = 0.5 * (x0 + x1);
    }
  }

  g.variance.resize(bins);
  g.representative.resize(bins);
  FreqFunction weight = moment_weight(p);
  FreqFunction centroid = centroid_weight(p);
  for (std::size_t j = 0; j < bins; ++j) {
    Interval bin{g.edges[j], g.edges[j + 1]};
    double v = bin.empty() ? 0.0 : std::max(0.0, integrate(sigma, weight, bin).value.real());
    g.variance[j] = v;
    if (v > 0.0) {
      double c = integrate(sigma, centroid, bin).value.real() / v;
      g.representative[j] = std::clamp(c, bin.lo, bin.hi);
    } else {
      g.representative[j] = 0.5 * (bin.lo + bin.hi);
    }
  }
  double odd = integrate(sigma, odd_weight(p)).value.real();
  g.symmetrized = std::abs(odd) > 1e-9 * std::max(g.total_moment, 1e-300);
  return g;
}

double grid_covariance(const NormalFieldGrid& grid, double t, double s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.bins(); ++j) {
    double u = grid.representative[j];
    sum += (1.0 + u * u) * grid.variance[j] *
           (increment_kernel_value(t, u) * std::conj(increment_kernel_value(s, u))).real();
  }
  return sum;
}

PathEnsemble sample_paths(const SpectralMeasure& sigma, const NormalFieldGrid& grid, const std::vector<double>& times,
                          std::size_t n_paths, std::uint64_t seed, unsigned workers) {
  require_synthesis_order(sigma);
  if (grid.p != 1) throw InconsistentGrid("the synthesis grid must use p = 1, got p = " + std::to_string(grid.p));
  if (grid.measure != sigma.describe())
    throw InconsistentGrid("grid was built for " + grid.measure + ", not " + sigma.describe());
  if (grid.representative.size() != grid.bins() || grid.edges.size() != grid.bins() + 1)
    throw InconsistentGrid("grid arrays have inconsistent lengths");
  check_grid_bins(grid);

  const auto T = static_cast<Eigen::Index>(times.size());
  const auto J = static_cast<Eigen::Index>(grid.bins());
  Eigen::MatrixXd c_re(T, J), c_im(T, J);
  for (Eigen::Index j = 0; j < J; ++j) {
    double u = grid.representative[j];
    double scale = std::sqrt((1.0 + u * u) * grid.variance[j]);
    for (Eigen::Index i = 0; i < T; ++i) {
      Complex xi = increment_kernel_value(times[i], u);
      c_re(i, j) = scale * xi.real();
      c_im(i, j) = scale * xi.imag();
    }
  }

  PathEnsemble out;
  out.times = times;
  out.seed = seed;
  out.grid = grid;
  out.values.resize(static_cast<Eigen::Index>(n_paths), T);
  std::size_t n_blocks = (n_paths + kPathBlock - 1) / kPathBlock;
  detail::parallel_blocks(n_blocks, workers, [&](std::size_t b) {
    std::size_t first = b * kPathBlock;
    auto nb = static_cast<Eigen::Index>(std::min(kPathBlock, n_paths - first));
    Eigen::MatrixXd A(J, nb), B(J, nb);
    for (Eigen::Index k = 0; k < nb; ++k) {
      std::uint64_t path = first + static_cast<std::uint64_t>(k);
      for (Eigen::Index j = 0; j < J; ++j) {
        NormalPair z = normal_pair(seed, path, static_cast<std::uint32_t>(j), StreamTag::Synthesis);
        A(j, k) = z.a;
        B(j, k) = z.b;
      }
    }
    Eigen::MatrixXd X = c_re * A - c_im * B;
    out.values.middleRows(static_cast<Eigen::Index>(first), nb) = X.transpose();
  });
  return out;
}

CharFunctionalResult char_functional_check(const SpectralMeasure& sigma, const TestFunction& psi,
                                           const NormalFieldGrid& grid, std::size_t n_samples, std::uint64_t seed,
                                           unsigned workers) {
  if (!psi.real_valued()) throw InvalidArgument("the characteristic functional needs a real-valued test function");
  if (grid.measure != sigma.describe())
    throw InconsistentGrid("grid was built for " + grid.measure + ", not " + sigma.describe());
  if (n_samples == 0) throw InvalidArgument("need at least one sample");
  check_grid_bins(grid);
  CharFunctionalResult r;
  r.samples = n_samples;
  r.q = q_sigma(psi, sigma).real();
  r.target = std::exp(-0.5 * r.q);
  if (psi.is_zero()) {
    r.estimate = 1.0;
    return r;
  }

  FreqFunction f = psi.fourier_transform();
  std::size_t J = grid.bins();
  std::vector<double> a(J), b(J);
  std::vector<std::uint32_t> active;
  for (std::size_t j = 0; j < J; ++j) {
    double u = grid.representative[j];
    double w = (1.0 + u * u) * grid.variance[j];
    Complex v = f(u);
    a[j] = std::sqrt(w) * v.real();
    b[j] = std::sqrt(w) * v.imag();
    r.q_grid += w * std::norm(v);
    if (a[j] != 0.0 || b[j] != 0.0) active.push_back(static_cast<std::uint32_t>(j));
  }

  std::size_t block = 4096;
  std::size_t n_blocks = (n_samples + block - 1) / block;
  std::vector<Complex> partial(n_blocks);
  detail::parallel_blocks(n_blocks, workers, [&](std::size_t blk) {
    std::size_t first = blk * block;
    std::size_t last = std::min(n_samples, first + block);
    Complex acc{};
    for (std::size_t i = first; i < last; ++i) {
      double y = 0.0;
      for (std::uint32_t j : active) {
        NormalPair z = normal_pair(seed, i, j, StreamTag::CharFunctional);
        y += a[j] * z.a + b[j] * z.b;
      }
      acc += std::polar(1.0, y);
    }
    partial[blk] = acc;
  });
  Complex sum{};
  for (const auto& p : partial) sum += p;
  r.estimate = sum / static_cast<double>(n_samples);
  double var_cos = 0.5 * (1.0 + std::exp(-2.0 * r.q)) - std::exp(-r.q);
  double se = std::sqrt(std::max(var_cos, 1e-300) / static_cast<double>(n_samples));
  r.z_score = (r.estimate.real() - r.target) / se;
  return r;
}

double rkhs_kernel(const SpectralMeasure& sigma, const TestFunction& phi, const TestFunction& psi) {
  if (!phi.real_valued() || !psi.real_valued()) throw InvalidArgument("the RKHS kernel needs real-valued test functions");
  return std::exp(-0.5 * q_sigma(phi - psi, sigma).real());
}

StationarityReport stationarity_check(const PathEnsemble& ensemble, double lag) {
  const auto& t = ensemble.times;
  if (t.size() < 2) throw InsufficientPairs("ensemble has fewer than two times");
  double step = t[1] - t[0];
  if (!(step > 0.0)) throw InsufficientPairs("ensemble times must increase");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(t[i])))
      throw InsufficientPairs("ensemble times do not form an arithmetic grid");
  double k_real = std::abs(lag) / step;
  long long k = std::llround(k_real);
  if (std::abs(k_real - static_cast<double>(k)) > 1e-6) throw InsufficientPairs("lag is not a multiple of the grid step");
  long long n_groups = static_cast<long long>(t.size()) - k;
  if (n_groups < 2) throw InsufficientPairs("fewer than two pairs at this lag");
  auto n = static_cast<double>(ensemble.values.rows());
  if (n < 2) throw InsufficientPairs("need at least two paths");

  StationarityReport rep;
  rep.lag = lag;
  for (long long i = 0; i < n_groups; ++i) {
    Eigen::VectorXd d = ensemble.values.col(i + k) - ensemble.values.col(i);
    double mean = d.mean();
    double var = (d.array() - mean).square().sum() / (n - 1.0);
    rep.groups.push_back({t[static_cast<std::size_t>(i)], var, var * std::sqrt(2.0 / (n - 1.0))});
    rep.pooled_variance += var;
  }
  rep.pooled_variance /= static_cast<double>(n_groups);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& g : rep.groups) {
    lo = std::min(lo, g.variance);
    hi = std::max(hi, g.variance);
    if (g.standard_error > 0.0)
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(g.variance - rep.pooled_variance) / g.standard_error);
  }
  rep.spread = hi - lo;
  rep.consistent = rep.max_abs_z <= 4.0;
  return rep;
}

}  // namespace spectral

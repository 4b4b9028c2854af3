#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>

#include "spectral/rng.hpp"
#include "spectral/testfn.hpp"

// Reference computations kept independent of the library's integration
// backend: plain composite rules and direct sums.
namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Composite Simpson on [a, b] with n (even) panels.
template <typename T>
T simpson(const std::function<T(double)>& f, double a, double b, int n) {
  double h = (b - a) / n;
  T sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * (h / 3.0);
}

/// ψ̂(u) = ∫ e^{-iux} ψ(x) dx from time-domain samples on [-L, L].
inline std::complex<double> fourier_integral(const std::function<std::complex<double>(double)>& psi, double u,
                                             double L = 40.0, int n = 20000) {
  std::function<std::complex<double>(double)> g = [&](double x) { return std::polar(1.0, -u * x) * psi(x); };
  return simpson(g, -L, L, n);
}

/// Σ_{n∈ℤ} e^{-a n²}
inline double theta(double a, int N = 200) {
  double s = 1.0;
  for (int n = 1; n <= N; ++n) s += 2.0 * std::exp(-a * n * n);
  return s;
}

/// Σ_{n≥1} (1 - cos nt)/n² by direct summation with the tail bound 2/N.
inline double comb_cosine_series(double t, long N = 2000000) {
  double s = 0.0;
  for (long n = N; n >= 1; --n) s += (1.0 - std::cos(n * t)) / (static_cast<double>(n) * n);
  return s;
}

inline double uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t slot, bool second = false) {
  auto u = spectral::uniform_pair(seed, index, slot, spectral::StreamTag::Parameters);
  return second ? u.b : u.a;
}

/// A Gaussian packet with parameters drawn from (seed, index).
inline spectral::TestFunction random_packet(std::uint64_t seed, std::uint64_t index, bool real = true) {
  double c = -2.0 + 4.0 * uniform(seed, index, 0);
  double w = 0.4 + 1.2 * uniform(seed, index, 0, true);
  double a = 0.3 + uniform(seed, index, 1);
  double nu = real ? 0.0 : -2.0 + 4.0 * uniform(seed, index, 1, true);
  return spectral::TestFunction::gaussian(c, w, nu, a);
}

}  // namespace oracle

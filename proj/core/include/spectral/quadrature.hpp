#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace spectral::quad {

using Complex = std::complex<double>;
using ComplexFn = std::function<Complex(double)>;

struct Result {
  Complex value{};
  double error = 0.0;
  double l1 = 0.0;  ///< ∫|f|, used for relative error targets
  std::size_t evaluations = 0;
};

/// Global adaptive Gauss–Kronrod (21-point) on a finite interval.
/// Throws UnreachableTolerance when `max_intervals` is exhausted.
Result adaptive_gauss_kronrod(const ComplexFn& f, double a, double b, double rel_tol, double abs_tol,
                              std::size_t max_intervals = 4000);

/// Same, seeded with a list of disjoint initial segments whose results are
/// refined under one global error target.
Result adaptive_gauss_kronrod(const ComplexFn& f, const std::vector<std::pair<double, double>>& segments,
                              double rel_tol, double abs_tol, std::size_t max_intervals = 4000);

/// Double-exponential quadrature for integrable endpoint singularities.
Result tanh_sinh(const ComplexFn& f, double a, double b, double rel_tol);

/// ∫_A^∞ exp(i ω x) shape(x) dx for smooth `shape` (Ooura–Mori for ω ≠ 0).
Result oscillatory_tail(const ComplexFn& shape, double omega, double start, double rel_tol);

/// Σ_{n >= start} exp(i θ n) h(n) for h smooth and slowly varying on the
/// scale of `start`. Uses a polylogarithm boundary expansion away from
/// θ ≡ 0 (mod 2π) and Euler–Maclaurin near it; a finite block of terms is
/// summed directly before the expansion point.
Result lattice_tail(const ComplexFn& h, double theta, long long start, double rel_tol);

}  // namespace spectral::quad

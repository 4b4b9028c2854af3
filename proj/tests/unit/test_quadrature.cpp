#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spectral/errors.hpp"
#include "spectral/quadrature.hpp"

using namespace spectral;
using quad::Complex;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Quadrature, GaussKronrodPolynomialAndOscillatory) {
  auto r = quad::adaptive_gauss_kronrod([](double x) { return Complex{x * x * x - x, 0.0}; }, -1.0, 2.0, 1e-13, 0.0);
  EXPECT_NEAR(r.value.real(), (16.0 / 4 - 4.0 / 2) - (1.0 / 4 - 1.0 / 2), 1e-13);
  auto s = quad::adaptive_gauss_kronrod([](double x) { return std::polar(1.0, 7.0 * x); }, 0.0, 3.0, 1e-12, 0.0);
  Complex exact = (std::polar(1.0, 21.0) - 1.0) / Complex{0.0, 7.0};
  EXPECT_LT(std::abs(s.value - exact), 1e-12);
  EXPECT_GE(s.error, 0.0);
}

TEST(Quadrature, SegmentsShareOneErrorTarget) {
  std::vector<std::pair<double, double>> seg{{0.0, 1.0}, {1.0, 2.0}, {2.0, 5.0}};
  auto r = quad::adaptive_gauss_kronrod([](double x) { return Complex{std::exp(-x), 0.0}; }, seg, 1e-13, 0.0);
  EXPECT_NEAR(r.value.real(), 1.0 - std::exp(-5.0), 1e-13);
}

TEST(Quadrature, GaussKronrodBudgetExhaustionThrows) {
  auto f = [](double x) { return Complex{std::sin(1.0 / x), 0.0}; };
  EXPECT_THROW(quad::adaptive_gauss_kronrod(f, 1e-9, 1.0, 1e-15, 0.0, 20), UnreachableTolerance);
}

TEST(Quadrature, TanhSinhEndpointSingularity) {
  // ∫_0^1 x^{-1/2} dx = 2 and ∫_0^1 x^{-0.9} dx = 10
  EXPECT_NEAR(quad::tanh_sinh([](double x) { return Complex{1.0 / std::sqrt(x), 0.0}; }, 0.0, 1.0, 1e-12).value.real(),
              2.0, 1e-10);
  EXPECT_NEAR(quad::tanh_sinh([](double x) { return Complex{std::pow(x, -0.9), 0.0}; }, 0.0, 1.0, 1e-12).value.real(),
              10.0, 1e-7);
}

TEST(Quadrature, OscillatoryTailMatchesSineIntegral) {
  // ∫_1^∞ e^{ix}/x dx = -Ci(1) ... compare Im part with π/2 - Si(1).
  auto r = quad::oscillatory_tail([](double x) { return Complex{1.0 / x, 0.0}; }, 1.0, 1.0, 1e-12);
  double si1 = 0.0;
  for (int k = 0; k < 20; ++k) {
    double term = std::pow(-1.0, k) / ((2 * k + 1) * std::tgamma(2 * k + 2));
    si1 += term;
  }
  EXPECT_NEAR(r.value.imag(), kPi / 2 - si1, 1e-10);
  // Non-oscillatory: ∫_2^∞ x^{-3} dx = 1/8
  auto s = quad::oscillatory_tail([](double x) { return Complex{std::pow(x, -3.0), 0.0}; }, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(s.value.real(), 0.125, 1e-12);
}

TEST(Quadrature, LatticeTailAgainstClosedForms) {
  // Σ_{n≥1} 1/n² = π²/6
  auto a = quad::lattice_tail([](double x) { return Complex{1.0 / (x * x), 0.0}; }, 0.0, 1, 1e-13);
  EXPECT_NEAR(a.value.real(), kPi * kPi / 6, 1e-12);
  // Σ_{n≥1} cos(n t)/n² = π²/6 - π t/2 + t²/4 on [0, 2π]
  for (double t : {0.5, 1.0, kPi, 5.0}) {
    auto b = quad::lattice_tail([](double x) { return Complex{1.0 / (x * x), 0.0}; }, t, 1, 1e-13);
    EXPECT_NEAR(b.value.real(), kPi * kPi / 6 - kPi * t / 2 + t * t / 4, 1e-11) << t;
  }
  // Σ_{n≥1} (-1)^{n+1}/n = log 2
  auto c = quad::lattice_tail([](double x) { return Complex{1.0 / x, 0.0}; }, kPi, 1, 1e-13);
  EXPECT_NEAR(-c.value.real(), std::log(2.0), 1e-12);
}

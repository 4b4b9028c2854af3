#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectral/errors.hpp"
#include "spectral/qform.hpp"
#include "spectral/sigmaspace.hpp"

using namespace spectral;
using oracle::kPi;

namespace {

SpectralMeasure unit(double value) { return SpectralMeasure::lebesgue({0.0, 1.0}, value); }

}  // namespace

TEST(SigmaSpace, DensityRescalingGivesEqualClasses) {
  SigmaFunction a = SigmaFunction::from_expression("2", unit(1.0));
  SigmaFunction b = SigmaFunction::from_expression("1", unit(4.0));
  EXPECT_NEAR(inner_product(a, b).real(), 4.0, 1e-12);
  SigmaFunction ones_a = SigmaFunction::from_expression("1", unit(1.0));
  SigmaFunction ones_b = SigmaFunction::from_expression("1", unit(4.0));
  EXPECT_NEAR(inner_product(ones_a, ones_b).real(), 2.0, 1e-12);
  EXPECT_NEAR(a.norm_sq(), 4.0, 1e-12);
  EXPECT_NEAR(b.norm_sq(), 4.0, 1e-12);
  EXPECT_TRUE(equiv_check(a, b));
  EXPECT_FALSE(equiv_check(a, SigmaFunction::from_expression("1", unit(1.0))));
  EXPECT_FALSE(mutually_singular(unit(1.0), unit(4.0)));
}

TEST(SigmaSpace, SingularPairsAreOrthogonal) {
  SpectralMeasure comb = SpectralMeasure::comb(), leb = SpectralMeasure::lebesgue();
  EXPECT_TRUE(mutually_singular(comb, leb));
  EXPECT_TRUE(mutually_singular(SpectralMeasure::cantor(), leb));
  EXPECT_TRUE(mutually_singular(SpectralMeasure::dirac(0.5), unit(1.0)));
  TestFunction f = TestFunction::gaussian(), g = TestFunction::gaussian(0.3, 0.7);
  EXPECT_EQ(process_correlation(comb, f, leb, g), Complex(0.0, 0.0));
  EXPECT_EQ(process_correlation(SpectralMeasure::cantor(), f, leb, g), Complex(0.0, 0.0));
}

TEST(SigmaSpace, SameMeasureReducesToTheForm) {
  TestFunction f = oracle::random_packet(5, 0, false), g = oracle::random_packet(5, 1, false);
  for (const auto& s : {SpectralMeasure::lebesgue(), SpectralMeasure::fbm(0.7), SpectralMeasure::comb(),
                        SpectralMeasure::cantor()}) {
    Complex ip = process_correlation(s, f, s, g);
    Complex ref = l_sigma(f, g, s).value;
    EXPECT_NEAR(std::abs(ip - ref), 0.0, 1e-8 * std::max(1.0, std::abs(ref))) << s.describe();
  }
}

TEST(SigmaSpace, DiracAtoms) {
  SigmaFunction a = SigmaFunction::from_atom_weights({{0.0, Complex(3.0)}}, SpectralMeasure::dirac(0.0, 4.0));
  SigmaFunction b = SigmaFunction::from_atom_weights({{0.0, Complex(0.0, 1.0)}}, SpectralMeasure::dirac(0.0, 1.0));
  // √(4·1)·3·conj(i) = -6i
  EXPECT_NEAR(std::abs(inner_product(a, b) - Complex(0.0, -6.0)), 0.0, 1e-12);
  EXPECT_NEAR(a.norm_sq(), 36.0, 1e-12);
}

TEST(SigmaSpace, HermitianAndCauchySchwarz) {
  std::vector<SigmaFunction> fs;
  std::vector<SpectralMeasure> ms{unit(1.0),
                                  unit(4.0),
                                  SpectralMeasure::density("exp(-u^2/2)"),
                                  SpectralMeasure::lebesgue(),
                                  SpectralMeasure::fbm(0.7),
                                  SpectralMeasure::comb(),
                                  SpectralMeasure::mixture({{1.0, SpectralMeasure::dirac(0.0)}, {2.0, unit(1.0)}})};
  for (std::size_t i = 0; i < ms.size(); ++i)
    fs.push_back(SigmaFunction::from_test_function(oracle::random_packet(9, i, i % 2 == 0), ms[i]));
  for (const auto& a : fs)
    for (const auto& b : fs) {
      Complex ab = inner_product(a, b), ba = inner_product(b, a);
      EXPECT_NEAR(std::abs(ab - std::conj(ba)), 0.0, 1e-9 * std::max(1.0, std::abs(ab)))
          << a.sigma().describe() << " " << b.sigma().describe();
      EXPECT_LE(std::abs(ab), std::sqrt(a.norm_sq() * b.norm_sq()) * (1 + 1e-9) + 1e-12);
    }
}

TEST(SigmaSpace, DominatingMeasureDoesNotMatter) {
  // Splitting σ into pieces changes any sum-based λ but not the pairing.
  SpectralMeasure whole = SpectralMeasure::density("exp(-u^2/2)");
  SpectralMeasure split = SpectralMeasure::mixture({{1.0, SpectralMeasure::density("exp(-u^2/2)", {-kInfinity, 0.5})},
                                                    {1.0, SpectralMeasure::density("exp(-u^2/2)", {0.5, kInfinity})}});
  TestFunction f = oracle::random_packet(21, 0, false), g = oracle::random_packet(21, 1, false);
  Complex a = process_correlation(whole, f, whole, g);
  Complex b = process_correlation(split, f, whole, g);
  Complex c = process_correlation(split, f, split, g);
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-8 * std::abs(a));
  EXPECT_NEAR(std::abs(a - c), 0.0, 1e-8 * std::abs(a));
}

TEST(SigmaSpace, GeometricMeanOfDensities) {
  // ⟨1·√(e^{-u²}), 1·√1⟩ on ℝ = ∫ e^{-u²/2} du
  SigmaFunction a = SigmaFunction::from_expression("1", SpectralMeasure::density("exp(-u^2)"));
  SigmaFunction b = SigmaFunction::from_expression("exp(-u^2/4)", SpectralMeasure::lebesgue());
  double ref = oracle::simpson<double>([](double u) { return std::exp(-0.75 * u * u); }, -20, 20, 4000);
  EXPECT_NEAR(inner_product(a, b).real(), ref, 1e-8 * ref);
}

TEST(SigmaSpace, PairsWithoutRulesAreUnsupported) {
  SpectralMeasure fat = SpectralMeasure::self_similar({{0.5, 0.5}, {0.0, 0.5}, {0.5, 0.5}, 1.0});
  SigmaFunction a = SigmaFunction::from_expression("1", fat);
  SigmaFunction b = SigmaFunction::from_expression("1", unit(1.0));
  EXPECT_THROW(inner_product(a, b), Unsupported);
  Lattice half{0.5};
  EXPECT_THROW(inner_product(SigmaFunction::from_expression("1", SpectralMeasure::lattice(half)),
                             SigmaFunction::from_expression("1", SpectralMeasure::comb())),
               Unsupported);
  EXPECT_THROW(SigmaFunction::from_expression("exp(u^2)", SpectralMeasure::comb()), InvalidArgument);
}

TEST(CommonGrid, DensityPairMatchesTheInnerProduct) {
  TestFunction f = TestFunction::gaussian(0.1, 0.8), g = TestFunction::gaussian(-0.2, 1.1);
  CommonGridCorrelation r = common_grid_correlation(unit(1.0), f, unit(4.0), g, 2.0, 400, 100000, 13);
  CommonGridCorrelation ones = common_grid_correlation(unit(1.0), TestFunction::fourier_expression("1", 0, 1), unit(4.0),
                                                       TestFunction::fourier_expression("1", 0, 1), 2.0, 400, 100000, 14);
  EXPECT_NEAR(ones.target.real(), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(ones.grid_target - Complex(2.0, 0.0)), 0.0, 1e-4);
  EXPECT_TRUE(ones.consistent) << ones.z_re << " " << ones.z_im;
  Complex exact = process_correlation(unit(1.0), f, unit(4.0), g);
  EXPECT_NEAR(std::abs(r.target - exact), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.grid_target - exact), 0.0, 1e-3 * std::abs(exact));
  EXPECT_TRUE(r.consistent) << r.z_re << " " << r.z_im;
}

TEST(CommonGrid, SingularPairHasZeroMean) {
  TestFunction f = TestFunction::gaussian(), g = TestFunction::gaussian(0.5, 0.6, 0.3);
  CommonGridCorrelation r =
      common_grid_correlation(SpectralMeasure::comb(), f, SpectralMeasure::lebesgue(), g, 8.0, 64, 50000, 4);
  EXPECT_EQ(r.target, Complex(0.0, 0.0));
  EXPECT_EQ(r.grid_target, Complex(0.0, 0.0));
  EXPECT_TRUE(r.consistent);
  CommonGridCorrelation w =
      common_grid_correlation(SpectralMeasure::comb(), f, SpectralMeasure::lebesgue(), g, 8.0, 64, 50000, 4, 3);
  EXPECT_EQ(w.estimate, r.estimate);
}

#include <gtest/gtest.h>

#include <cmath>

#include "spectral/rng.hpp"
#include "spectral/stats.hpp"

using namespace spectral;

TEST(Stats, NormalCdfReferenceValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.959963984540054), 0.025, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-28);
}

TEST(Stats, KolmogorovCriticalValues) {
  // Asymptotic critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_LT(kolmogorov_survival(3.0), 1e-7);
}

TEST(Stats, KsAcceptsNormalAndRejectsShifted) {
  std::vector<double> good, bad;
  for (int i = 0; i < 500; ++i) {
    NormalPair z = normal_pair(77, i, 0, StreamTag::Parameters);
    good.push_back(z.a);
    bad.push_back(z.a + 0.5);
  }
  EXPECT_GT(ks_test_normal(good).p_value, 0.01);
  EXPECT_LT(ks_test_normal(bad).p_value, 1e-6);
}

TEST(Stats, KsStatisticOnTinySample) {
  // One point at 0: D = max(1 - 0.5, 0.5 - 0) = 0.5
  EXPECT_DOUBLE_EQ(ks_test_normal({0.0}).statistic, 0.5);
}

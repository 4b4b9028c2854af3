#pragma once

#include <vector>

namespace spectral {

/// Standard normal CDF.
double normal_cdf(double x);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;  ///< sup |F_n - Φ|
  double p_value = 1.0;
};

/// One-sample Kolmogorov–Smirnov test against N(0, 1) with the Stephens
/// finite-sample correction.
KsResult ks_test_normal(std::vector<double> sample);

}  // namespace spectral

#include "spectral/stats.hpp"

#include <algorithm>
#include <cmath>

#include "spectral/errors.hpp"

namespace spectral {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> sample) {
  if (sample.empty()) throw InvalidArgument("KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double F = normal_cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  double rn = std::sqrt(n);
  return KsResult{d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

}  // namespace spectral

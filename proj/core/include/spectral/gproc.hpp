#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spectral/measure.hpp"
#include "spectral/qform.hpp"
#include "spectral/testfn.hpp"

namespace spectral {

struct CovarianceValue {
  double value = 0.0;
  double error_bound = 0.0;
  IntegrationMethod method = IntegrationMethod::ClosedForm;
};

/// r(t, s) = Re ∫ ξ_t conj(ξ_s) dσ. The imaginary part vanishes for
/// symmetric σ and is dropped otherwise (real-process contract).
CovarianceValue pointwise_covariance(const SpectralMeasure& sigma, double t, double s,
                                     const IntegrationOptions& options = {});

using GramInput = std::variant<TestFunction, IncrementKernel>;

FreqFunction transform_of(const GramInput& input);

/// G_ij = L_σ(input_i, input_j); Hermitian.
Eigen::MatrixXcd gram_matrix(const SpectralMeasure& sigma, const std::vector<GramInput>& inputs,
                             const IntegrationOptions& options = {});

enum class BinRule { EqualWidth, EqualMass };

std::string to_string(BinRule r);
BinRule bin_rule_from_string(const std::string& s);

/// Discretized normal field: bin j covers [edges[j], edges[j+1]) and
/// carries variance ∫_bin dσ/(1+u²)^p at its σ-mass centroid.
struct NormalFieldGrid {
  std::vector<double> edges;
  std::vector<double> variance;
  std::vector<double> representative;
  int p = 1;
  double u_max = 0.0;
  BinRule rule = BinRule::EqualWidth;
  double truncation_mass = 0.0;
  double total_moment = 0.0;
  /// σ is not symmetric: sampled processes follow the law of (σ(du)+σ(-du))/2.
  bool symmetrized = false;
  std::string measure;  ///< describe() of the source measure

  std::size_t bins() const { return variance.size(); }
};

NormalFieldGrid build_grid(const SpectralMeasure& sigma, double u_max, std::size_t bins, BinRule rule,
                           int p = 1);

struct PathEnsemble {
  std::vector<double> times;
  Eigen::MatrixXd values;  ///< paths × times
  std::uint64_t seed = 0;
  NormalFieldGrid grid;
  std::string method = "spectral_synthesis";
};

/// X(t) = Σ_j √(1+u_j²) [Re ξ_t(u_j) A_j - Im ξ_t(u_j) B_j] with A_j, B_j
/// iid N(0, variance_j) drawn from substream (seed, path, bin). Results do
/// not depend on `workers`.
PathEnsemble sample_paths(const SpectralMeasure& sigma, const NormalFieldGrid& grid, const std::vector<double>& times,
                          std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

/// Σ_j (1+u_j²) Re(ξ_t conj ξ_s)(u_j) variance_j, the covariance the
/// synthesis realizes exactly.
double grid_covariance(const NormalFieldGrid& grid, double t, double s);

struct CharFunctionalResult {
  Complex estimate{};
  double target = 0.0;   ///< exp(-q_σ(ψ)/2)
  double z_score = 0.0;  ///< real part against the known MC spread of cos Y
  double q = 0.0;
  double q_grid = 0.0;   ///< variance of Y realized by the grid
  std::size_t samples = 0;
};

/// Monte Carlo estimate of E[exp(iY(ψ))] through the grid pairing
/// Y = Σ_j √(1+u_j²) [Re ψ̂(u_j) A_j + Im ψ̂(u_j) B_j].
CharFunctionalResult char_functional_check(const SpectralMeasure& sigma, const TestFunction& psi,
                                           const NormalFieldGrid& grid, std::size_t n_samples, std::uint64_t seed,
                                           unsigned workers = 1);

/// exp(-q_σ(φ - ψ)/2)
double rkhs_kernel(const SpectralMeasure& sigma, const TestFunction& phi, const TestFunction& psi);

struct StationarityGroup {
  double start = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};

struct StationarityReport {
  double lag = 0.0;
  std::vector<StationarityGroup> groups;
  double pooled_variance = 0.0;
  double spread = 0.0;      ///< max - min of group variances
  double max_abs_z = 0.0;   ///< largest |group - pooled| / standard error
  bool consistent = true;   ///< max_abs_z <= 4
};

/// Var(X(t+lag) - X(t)) for every start t on the ensemble grid.
/// Throws InsufficientPairs when the grid holds fewer than two such pairs.
StationarityReport stationarity_check(const PathEnsemble& ensemble, double lag);

}  // namespace spectral

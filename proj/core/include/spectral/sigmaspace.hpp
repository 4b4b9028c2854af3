#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spectral/measure.hpp"
#include "spectral/testfn.hpp"

namespace spectral {

/// The class of f √dσ in the space of sigma-functions.
class SigmaFunction {
 public:
  SigmaFunction(FreqFunction f, SpectralMeasure sigma, std::string description = {});

  /// f given by a real expression over u.
  static SigmaFunction from_expression(const std::string& expression, SpectralMeasure sigma);
  /// f given at atom locations, zero elsewhere.
  static SigmaFunction from_atom_weights(std::vector<std::pair<double, Complex>> values, SpectralMeasure sigma);
  /// f = ψ̂
  static SigmaFunction from_test_function(const TestFunction& psi, SpectralMeasure sigma);

  const FreqFunction& f() const { return f_; }
  const SpectralMeasure& sigma() const { return sigma_; }
  const std::string& description() const { return description_; }

  /// ‖f‖² in L²(σ)
  double norm_sq() const;

 private:
  FreqFunction f_;
  SpectralMeasure sigma_;
  std::string description_;
};

/// ∫ f₁ conj(f₂) √(dσ₁/dλ · dσ₂/dλ) dλ with λ = σ₁ + σ₂, evaluated by kind
/// rules. Throws Unsupported for pairs without a rule.
Complex inner_product(const SigmaFunction& a, const SigmaFunction& b);

/// Decided structurally from the Lebesgue decomposition in both directions.
bool mutually_singular(const SpectralMeasure& a, const SpectralMeasure& b);

/// ⟨f̂ √dσ₁, ĝ √dσ₂⟩
Complex process_correlation(const SpectralMeasure& sigma1, const TestFunction& f, const SpectralMeasure& sigma2,
                            const TestFunction& g);

/// ‖a - b‖² <= 1e-9 (‖a‖² + ‖b‖²)
bool equiv_check(const SigmaFunction& a, const SigmaFunction& b);

/// Monte Carlo of E[X₁(f) conj X₂(g)] for two processes driven by one
/// complex normal field on a common grid for σ₁ + σ₂, with cell weights
/// split by the Radon–Nikodym factors.
struct CommonGridCorrelation {
  Complex estimate{};
  Complex target{};       ///< inner product in the sigma-function space
  Complex grid_target{};  ///< exact mean of the discretized estimator
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  double z_re = 0.0;
  double z_im = 0.0;
  std::size_t cells = 0;
  std::size_t samples = 0;
  bool consistent = false;  ///< both |z| <= 4
};

CommonGridCorrelation common_grid_correlation(const SpectralMeasure& sigma1, const TestFunction& f,
                                              const SpectralMeasure& sigma2, const TestFunction& g, double u_max,
                                              std::size_t bins, std::size_t n_samples, std::uint64_t seed,
                                              unsigned workers = 1);

}  // namespace spectral

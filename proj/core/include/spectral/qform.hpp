#pragma once

#include <optional>
#include <vector>

#include "spectral/measure.hpp"
#include "spectral/testfn.hpp"

namespace spectral {

struct FormValue {
  Complex value{};
  double error_bound = 0.0;
  IntegrationMethod method = IntegrationMethod::ClosedForm;

  double real() const { return value.real(); }
};

/// ∫ a conj(b) dσ. Throws InvalidArgument when σ has no class-C
/// certificate and UnreachableTolerance when the error bound exceeds
/// `required_rel` times both the magnitude and, for distinct arguments, the
/// Cauchy–Schwarz scale √(∫|a|²dσ ∫|b|²dσ) (absolute below 1e-300).
FormValue sesquilinear_form(const FreqFunction& a, const FreqFunction& b, const SpectralMeasure& sigma,
                            double required_rel = 1e-8, const IntegrationOptions& options = {});

/// q_σ(ψ) = ∫ |ψ̂|² dσ
FormValue q_sigma(const TestFunction& psi, const SpectralMeasure& sigma, const IntegrationOptions& options = {});

/// L_σ(ψ₁, ψ₂) = ∫ ψ̂₁ conj(ψ̂₂) dσ
FormValue l_sigma(const TestFunction& psi1, const TestFunction& psi2, const SpectralMeasure& sigma,
                  const IntegrationOptions& options = {});

struct FrechetBound {
  double bound = 0.0;     ///< C · sup_u |ψ̂(u)|² (1+u²)^p
  bool holds = true;      ///< q_σ(ψ) <= bound
  double constant = 0.0;  ///< C = moment_integral(σ, p)
  double sup = 0.0;
  int p = 0;
  double q = 0.0;
};

FrechetBound frechet_bound(const TestFunction& psi, const SpectralMeasure& sigma);

/// s_k with ŝ_k(u) = exp(-k (u - center)²).
TestFunction witness_function(double k, double center = 0.0);

struct WitnessPoint {
  double k = 0.0;
  double l2_norm_sq = 0.0;  ///< ‖s_k‖² = (1/2π) √(π/2k)
  FormValue q;
  std::optional<FormValue> cauchy_gap;  ///< q_σ(s_k - s_previous)
};

std::vector<WitnessPoint> closability_witness(const SpectralMeasure& sigma, const std::vector<double>& k_values,
                                              double center = 0.0);

struct TranslationCheck {
  double q_orig = 0.0;
  double q_shifted = 0.0;
  double relative_gap = 0.0;
};

TranslationCheck translation_invariance_check(const TestFunction& psi, const SpectralMeasure& sigma, double t);

}  // namespace spectral

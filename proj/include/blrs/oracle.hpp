#pragma once

// Maximum-likelihood reference solver independent of the EM iteration.
//
// With λᵢ the eigenvalues of ΦΦᵀ and ȳ = Uᵀy, maximizing the evidence over
// (β, γ = β/α) gives, for every ν,
//
//   β(γ) = m / S(γ),   S(γ) = Σ ȳᵢ² / (1 + λᵢγ),
//   γ*   = argmin  m ln S(γ) + Σ ln(1 + λᵢγ).
//
// The m − M zero eigenvalues of ΦΦᵀ enter only through residual_sq.

#include <optional>

#include "blrs/core.hpp"

namespace blrs::oracle {

struct SpectrumProjection {
  VectorXd lambdas;  // positive eigenvalues of ΦᵀΦ (equal to those of ΦΦᵀ)
  VectorXd ybar_sq;  // squared projections of y onto matching eigenvectors
  double residual_sq = 0.0;  // mass of y on the null space of ΦΦᵀ
  double y_norm_sq = 0.0;
};

enum class Boundary { none, lower, upper };

struct GammaSolution {
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;  // +inf at the γ = 0 boundary
  double objective = 0.0;
  Boundary boundary = Boundary::none;
};

inline constexpr double kGammaMin = 1e-12;
inline constexpr double kGammaMax = 1e12;
inline constexpr int kGammaGridPoints = 256;
inline constexpr double kGoldenRelativeWidth = 1e-10;

/// Eigenvalues below 1e-12 · max(D) count as zero.
SpectrumProjection project_spectrum(const Precompute& pre);

/// S(γ) = Σ ȳᵢ²/(1 + λᵢγ) + residual_sq.
double spectral_sum(const SpectrumProjection& sp, double gamma);

double gamma_objective(const SpectrumProjection& sp, Index m, double gamma);
double gamma_objective_derivative(const SpectrumProjection& sp, Index m,
                                  double gamma);
double beta_from_gamma(const SpectrumProjection& sp, Index m, double gamma);

/// The log-spaced γ grid scanned by ml_solve.
VectorXd gamma_grid();

/// Grid scan over [1e-12, 1e12] followed by golden-section refinement of the
/// best cell. Throws NumericalError when the objective is flat.
GammaSolution ml_solve(const SpectrumProjection& sp, Index m);

/// ln St(y | ν, 0, B) (or the Gaussian density) with B = β⁻¹I + α⁻¹ΦΦᵀ built
/// densely. For m up to a few hundred.
double brute_evidence(const DesignMatrix& phi, const VectorXd& y,
                      DegreesOfFreedom nu, double alpha, double beta);

}  // namespace blrs::oracle

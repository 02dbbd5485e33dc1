#pragma once

// Bayesian linear regression with Student-t assumptions.
//
// Prior w ~ St(ν, 0, α⁻¹I) and noise whose scale carries 1 + (α/ν)‖w‖² give a
// Student-t evidence St(y | ν, 0, B), B = β⁻¹I + α⁻¹ΦΦᵀ, and a Student-t
// posterior St(w | ν+m, μ, C) with
//
//   A = (αI + βΦᵀΦ)⁻¹,  μ = βAΦᵀy,  C = ((ν + yᵀB⁻¹y)/(ν + m)) A.
//
// ν = ∞ is the Gaussian model. Hyperparameters are learned by q-EM, whose
// M-step is α = M/b, β = m/c with b = ‖μ‖² + tr C, c = ‖y − Φμ‖² + tr ΦᵀΦC.
// Every per-iteration quantity is evaluated through the eigendecomposition
// ΦᵀΦ = V D Vᵀ held in Precompute.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "blrs/data.hpp"

namespace blrs {

/// Student-t degrees of freedom ν; infinity selects the Gaussian model.
class DegreesOfFreedom {
 public:
  static constexpr double kMinimum = 1e-12;

  /// Throws DomainError unless ν >= kMinimum or ν = +inf.
  explicit DegreesOfFreedom(double nu);

  static DegreesOfFreedom gaussian() {
    return DegreesOfFreedom(std::numeric_limits<double>::infinity());
  }
  /// Accepts "inf" (also "+inf", "infinity") or a positive decimal number.
  static DegreesOfFreedom parse(const std::string& text);

  bool is_gaussian() const noexcept { return std::isinf(nu_); }
  double value() const noexcept { return nu_; }
  std::string to_string() const;

  friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

 private:
  double nu_;
};

struct Hyperparams {
  DegreesOfFreedom nu = DegreesOfFreedom::gaussian();
  double alpha = 1.0;
  double beta = 1.0;
};

struct PosteriorSummary {
  VectorXd mu;
  double yBy = 0.0;        // yᵀB⁻¹y
  double cov_scale = 1.0;  // (ν + yBy)/(ν + m); 1 for the Gaussian model
  double tr_C = 0.0;
  double tr_PhiTPhi_C = 0.0;
  double resid_sq = 0.0;   // ‖y − Φμ‖²
};

struct EStepStats {
  double b = 0.0;
  double c = 0.0;
};

struct EStep {
  PosteriorSummary posterior;
  EStepStats stats;
};

struct FitConfig {
  double rel_tol = 1e-7;
  std::size_t max_iter = 10000;
  double alpha0 = 1.0;
  double beta0 = 1.0;

  void validate() const;
};

struct TraceEntry {
  std::size_t iteration = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double log_evidence = 0.0;
};

struct FitResult {
  Hyperparams hyperparams;
  VectorXd mu;
  std::size_t iterations = 0;  // M-steps executed
  bool converged = false;
  std::vector<TraceEntry> trace;  // initial point plus one entry per M-step
};

/// μ = V (D + (α/β) I)⁻¹ y_pV, the ridge solution with penalty α/β.
VectorXd posterior_mean(const Precompute& pre, double alpha, double beta);

/// yᵀB⁻¹y = β(‖y‖² − y_pᵀμ) for μ computed at the same (α, β).
double quad_form_yBy(const Precompute& pre, const VectorXd& mu, double beta);

struct CovarianceTraces {
  double cov_scale = 1.0;
  double tr_C = 0.0;
  double tr_PhiTPhi_C = 0.0;
};

CovarianceTraces posterior_cov_traces(const Precompute& pre,
                                      DegreesOfFreedom nu, double alpha,
                                      double beta, double yBy);

/// ‖y‖² − 2y_pᵀμ + ‖Φμ‖², clamped at zero.
double residual_norm_sq(const Precompute& pre, const DesignMatrix& phi,
                        const VectorXd& mu);

EStep e_step(const Precompute& pre, const DesignMatrix& phi,
             DegreesOfFreedom nu, double alpha, double beta);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

AlphaBeta m_step(const EStepStats& stats, Index M, Index m);

/// ln|B| from the spectrum of ΦᵀΦ padded with m − M zeros.
double log_det_B(const Precompute& pre, double alpha, double beta);

/// ln St(y | ν, 0, B), or ln N(y | 0, B) for the Gaussian model.
double log_evidence(const Precompute& pre, DegreesOfFreedom nu, double alpha,
                    double beta);

/// q-EM from (alpha0, beta0). Stops once both |Δα|/α and |Δβ|/β fall below
/// rel_tol; running out of iterations returns converged = false.
FitResult fit_qem(const Precompute& pre, const DesignMatrix& phi,
                  DegreesOfFreedom nu, const FitConfig& config = {});

/// phi_new · μ; phi_new must already carry the training normalization.
VectorXd predict(const VectorXd& mu, const MatrixXd& phi_new);

struct DensePosterior {
  VectorXd mu;
  MatrixXd A;
  MatrixXd C;
};

/// Dense M×M evaluation of A, C and μ; intended for cross-checking.
DensePosterior posterior_dense(const Precompute& pre, const DesignMatrix& phi,
                               DegreesOfFreedom nu, double alpha, double beta);

}  // namespace blrs

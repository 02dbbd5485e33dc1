#include "blrs/core.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blrs/errors.hpp"
#include "blrs/special.hpp"

namespace blrs {

namespace {

void require_positive(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    throw DomainError("alpha and beta must be positive and finite");
  }
}

}  // namespace

DegreesOfFreedom::DegreesOfFreedom(double nu) : nu_(nu) {
  if (std::isnan(nu) || !(nu >= kMinimum)) {
    throw DomainError("degrees of freedom must be >= 1e-12 or inf");
  }
}

DegreesOfFreedom DegreesOfFreedom::parse(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity" || text == "Inf") {
    return gaussian();
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DomainError("cannot parse degrees of freedom '" + text +
                      "' (expected a positive number or 'inf')");
  }
  return DegreesOfFreedom(value);
}

std::string DegreesOfFreedom::to_string() const {
  if (is_gaussian()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << nu_;
  return os.str();
}

void FitConfig::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  require_positive(alpha0, beta0);
}

VectorXd posterior_mean(const Precompute& pre, double alpha, double beta) {
  require_positive(alpha, beta);
  const double ratio = alpha / beta;
  return pre.V * (pre.y_pV.array() / (pre.D.array() + ratio)).matrix();
}

double quad_form_yBy(const Precompute& pre, const VectorXd& mu, double beta) {
  const double value = beta * (pre.y_norm_sq - pre.y_p.dot(mu));
  if (value < -1e-8 * beta * pre.y_norm_sq) {
    throw NumericalError("yᵀB⁻¹y evaluated negative; mu does not match (α, β)");
  }
  return std::max(value, 0.0);
}

CovarianceTraces posterior_cov_traces(const Precompute& pre,
                                      DegreesOfFreedom nu, double alpha,
                                      double beta, double yBy) {
  require_positive(alpha, beta);
  CovarianceTraces out;
  if (!nu.is_gaussian()) {
    out.cov_scale = (nu.value() + yBy) / (nu.value() + static_cast<double>(pre.m));
  }
  const auto denom = alpha + beta * pre.D.array();
  out.tr_C = out.cov_scale * denom.inverse().sum();
  out.tr_PhiTPhi_C = out.cov_scale * (pre.D.array() / denom).sum();
  return out;
}

double residual_norm_sq(const Precompute& pre, const DesignMatrix& phi,
                        const VectorXd& mu) {
  if (phi.cols() != mu.size() || phi.rows() != pre.m) {
    throw DataError("residual_norm_sq: dimension mismatch");
  }
  const double value =
      pre.y_norm_sq - 2.0 * pre.y_p.dot(mu) + (phi.phi * mu).squaredNorm();
  return std::max(value, 0.0);
}

EStep e_step(const Precompute& pre, const DesignMatrix& phi,
             DegreesOfFreedom nu, double alpha, double beta) {
  EStep out;
  PosteriorSummary& post = out.posterior;
  post.mu = posterior_mean(pre, alpha, beta);
  post.yBy = quad_form_yBy(pre, post.mu, beta);
  const CovarianceTraces traces =
      posterior_cov_traces(pre, nu, alpha, beta, post.yBy);
  post.cov_scale = traces.cov_scale;
  post.tr_C = traces.tr_C;
  post.tr_PhiTPhi_C = traces.tr_PhiTPhi_C;
  post.resid_sq = residual_norm_sq(pre, phi, post.mu);

  out.stats.b = post.mu.squaredNorm() + post.tr_C;
  out.stats.c = post.resid_sq + post.tr_PhiTPhi_C;
  if (!(out.stats.b > 0.0) || !(out.stats.c > 0.0)) {
    throw NumericalError("degenerate E-step: b = " + std::to_string(out.stats.b) +
                         ", c = " + std::to_string(out.stats.c) +
                         " (y and Φ both zero?)");
  }
  return out;
}

AlphaBeta m_step(const EStepStats& stats, Index M, Index m) {
  if (!(stats.b > 0.0) || !(stats.c > 0.0)) {
    throw DomainError("m_step requires b > 0 and c > 0");
  }
  return {static_cast<double>(M) / stats.b, static_cast<double>(m) / stats.c};
}

double log_det_B(const Precompute& pre, double alpha, double beta) {
  require_positive(alpha, beta);
  const double inv_beta = 1.0 / beta;
  const double log_inv_beta = std::log(inv_beta);
  // Zero eigenvalues contribute ln β⁻¹ each; log1p keeps the ratio term exact.
  double sum = static_cast<double>(pre.m) * log_inv_beta;
  for (Index i = 0; i < pre.D.size(); ++i) {
    sum += std::log1p(pre.D(i) * beta / alpha);
  }
  return sum;
}

double log_evidence(const Precompute& pre, DegreesOfFreedom nu, double alpha,
                    double beta) {
  const VectorXd mu = posterior_mean(pre, alpha, beta);
  const double yBy = quad_form_yBy(pre, mu, beta);
  const double log_det = log_det_B(pre, alpha, beta);
  const double m = static_cast<double>(pre.m);

  if (nu.is_gaussian()) {
    return -0.5 * m * std::log(2.0 * std::numbers::pi) - 0.5 * log_det -
           0.5 * yBy;
  }
  const double v = nu.value();
  return log_gamma(0.5 * (v + m)) - log_gamma(0.5 * v) -
         0.5 * m * std::log(v * std::numbers::pi) - 0.5 * log_det -
         0.5 * (v + m) * std::log1p(yBy / v);
}

FitResult fit_qem(const Precompute& pre, const DesignMatrix& phi,
                  DegreesOfFreedom nu, const FitConfig& config) {
  config.validate();
  FitResult result;
  double alpha = config.alpha0;
  double beta = config.beta0;
  result.trace.reserve(std::min<std::size_t>(config.max_iter, 1024) + 1);
  result.trace.push_back({0, alpha, beta, log_evidence(pre, nu, alpha, beta)});

  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const EStep step = e_step(pre, phi, nu, alpha, beta);
    const AlphaBeta next = m_step(step.stats, pre.M, pre.m);
    result.iterations = it;
    result.trace.push_back(
        {it, next.alpha, next.beta, log_evidence(pre, nu, next.alpha, next.beta)});

    const bool settled =
        std::abs(next.alpha - alpha) / next.alpha < config.rel_tol &&
        std::abs(next.beta - beta) / next.beta < config.rel_tol;
    alpha = next.alpha;
    beta = next.beta;
    if (settled) {
      result.converged = true;
      break;
    }
  }

  result.hyperparams = {nu, alpha, beta};
  result.mu = posterior_mean(pre, alpha, beta);
  return result;
}

VectorXd predict(const VectorXd& mu, const MatrixXd& phi_new) {
  if (phi_new.cols() != mu.size()) {
    throw DataError("predict: expected " + std::to_string(mu.size()) +
                    " columns, found " + std::to_string(phi_new.cols()));
  }
  return phi_new * mu;
}

DensePosterior posterior_dense(const Precompute& pre, const DesignMatrix& phi,
                               DegreesOfFreedom nu, double alpha, double beta) {
  require_positive(alpha, beta);
  const Index M = phi.cols();
  const MatrixXd precision =
      alpha * MatrixXd::Identity(M, M) + beta * phi.phi.transpose() * phi.phi;
  const Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("αI + βΦᵀΦ is numerically singular");
  }

  DensePosterior out;
  out.A = llt.solve(MatrixXd::Identity(M, M));
  out.mu = beta * out.A * pre.y_p;
  double scale = 1.0;
  if (!nu.is_gaussian()) {
    // Woodbury: yᵀB⁻¹y = β‖y‖² − β² y_pᵀ A y_p.
    const double yBy =
        beta * pre.y_norm_sq - beta * beta * pre.y_p.dot(out.A * pre.y_p);
    scale = (nu.value() + yBy) / (nu.value() + static_cast<double>(pre.m));
  }
  out.C = scale * out.A;
  return out;
}

}  // namespace blrs

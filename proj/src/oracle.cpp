#include "blrs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blrs/errors.hpp"
#include "blrs/special.hpp"

namespace blrs::oracle {

namespace {

constexpr double kZeroEigenvalueRelative = 1e-12;
constexpr double kFlatObjectiveTolerance = 1e-12;

// Golden-section search for a minimum of f on [lo, hi] in log γ.
template <typename F>
double golden_section(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  // Widths are in log γ, so this is a relative width in γ.
  while (b - a > kGoldenRelativeWidth) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

SpectrumProjection project_spectrum(const Precompute& pre) {
  SpectrumProjection sp;
  sp.y_norm_sq = pre.y_norm_sq;
  const double cutoff =
      pre.D.size() > 0 ? kZeroEigenvalueRelative * pre.D.maxCoeff() : 0.0;

  std::vector<double> lambdas;
  std::vector<double> ybar;
  double projected = 0.0;
  for (Index j = 0; j < pre.D.size(); ++j) {
    if (!(pre.D(j) > cutoff)) continue;
    const double mass = pre.y_pV(j) * pre.y_pV(j) / pre.D(j);
    lambdas.push_back(pre.D(j));
    ybar.push_back(mass);
    projected += mass;
  }
  sp.lambdas = Eigen::Map<VectorXd>(lambdas.data(), static_cast<Index>(lambdas.size()));
  sp.ybar_sq = Eigen::Map<VectorXd>(ybar.data(), static_cast<Index>(ybar.size()));
  sp.residual_sq = std::max(pre.y_norm_sq - projected, 0.0);
  return sp;
}

double spectral_sum(const SpectrumProjection& sp, double gamma) {
  return (sp.ybar_sq.array() / (1.0 + sp.lambdas.array() * gamma)).sum() +
         sp.residual_sq;
}

double gamma_objective(const SpectrumProjection& sp, Index m, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
  const double s = spectral_sum(sp, gamma);
  if (!(s > 0.0)) throw DomainError("gamma objective undefined for y = 0");
  return static_cast<double>(m) * std::log(s) +
         (sp.lambdas.array() * gamma).log1p().sum();
}

double gamma_objective_derivative(const SpectrumProjection& sp, Index m,
                                  double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
  const auto denom = 1.0 + sp.lambdas.array() * gamma;
  const double s = spectral_sum(sp, gamma);
  if (!(s > 0.0)) throw DomainError("gamma objective undefined for y = 0");
  const double ds = -(sp.ybar_sq.array() * sp.lambdas.array() / denom.square()).sum();
  return static_cast<double>(m) * ds / s + (sp.lambdas.array() / denom).sum();
}

double beta_from_gamma(const SpectrumProjection& sp, Index m, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
  if (!(sp.y_norm_sq > 0.0)) throw DomainError("beta undefined for y = 0");
  const double s = spectral_sum(sp, gamma);
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(m) / s;
}

VectorXd gamma_grid() {
  return VectorXd::LinSpaced(kGammaGridPoints, std::log(kGammaMin),
                             std::log(kGammaMax))
      .array()
      .exp();
}

GammaSolution ml_solve(const SpectrumProjection& sp, Index m) {
  if (!(sp.y_norm_sq > 0.0)) throw DomainError("ml_solve requires y != 0");
  if (sp.lambdas.size() == 0) {
    throw DomainError("ml_solve requires at least one positive eigenvalue");
  }

  const VectorXd grid = gamma_grid();
  VectorXd values(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    values(i) = gamma_objective(sp, m, grid(i));
  }
  Index best = 0;
  const double lowest = values.minCoeff(&best);
  const double highest = values.maxCoeff();
  if (highest - lowest <= kFlatObjectiveTolerance * std::max(1.0, std::abs(lowest))) {
    throw NumericalError("gamma objective is flat over the search grid; "
                         "(alpha, beta) not identifiable");
  }

  auto finish = [&](double gamma, Boundary boundary) {
    GammaSolution out;
    out.gamma = gamma;
    out.boundary = boundary;
    out.objective = gamma_objective(sp, m, gamma);
    out.beta = beta_from_gamma(sp, m, gamma);
    out.alpha = gamma > 0.0 ? out.beta / gamma
                            : std::numeric_limits<double>::infinity();
    return out;
  };

  const Index last = grid.size() - 1;
  if (best == 0 && gamma_objective_derivative(sp, m, grid(0)) >= 0.0) {
    return finish(0.0, Boundary::lower);
  }
  if (best == last && gamma_objective_derivative(sp, m, grid(last)) <= 0.0) {
    return finish(kGammaMax, Boundary::upper);
  }

  const double lo = std::log(grid(std::max<Index>(best - 1, 0)));
  const double hi = std::log(grid(std::min<Index>(best + 1, last)));
  const double refined = std::exp(golden_section(
      [&](double t) { return gamma_objective(sp, m, std::exp(t)); }, lo, hi));
  const double gamma =
      gamma_objective(sp, m, refined) <= lowest ? refined : grid(best);
  return finish(gamma, Boundary::none);
}

double brute_evidence(const DesignMatrix& phi, const VectorXd& y,
                      DegreesOfFreedom nu, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError("alpha and beta must be positive");
  }
  if (phi.rows() != y.size()) throw DataError("brute_evidence: shape mismatch");
  const Index m = phi.rows();
  const MatrixXd B = MatrixXd::Identity(m, m) / beta +
                     phi.phi * phi.phi.transpose() / alpha;
  const Eigen::LLT<MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("B is not positive definite");

  const MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  const double yBy = y.dot(llt.solve(y));
  const double md = static_cast<double>(m);

  if (nu.is_gaussian()) {
    return -0.5 * md * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * yBy;
  }
  const double v = nu.value();
  return std::lgamma(0.5 * (v + md)) - std::lgamma(0.5 * v) -
         0.5 * md * std::log(v * std::numbers::pi) - 0.5 * log_det -
         0.5 * (v + md) * std::log(1.0 + yBy / v);
}

}  // namespace blrs::oracle

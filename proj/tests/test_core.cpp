#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blrs/core.hpp"
#include "blrs/errors.hpp"
#include "test_helpers.hpp"

using namespace blrs;
using blrs::testing::random_problem;
using blrs::testing::rel_err;

namespace {

const DegreesOfFreedom kGauss = DegreesOfFreedom::gaussian();

// Dense references built from Φ and y directly.
struct DenseReference {
  Eigen::MatrixXd B;
  Eigen::MatrixXd A;
  Eigen::VectorXd mu;
  double yBy;
  double log_det_B;
};

DenseReference dense_reference(const DesignMatrix& phi, const Eigen::VectorXd& y,
                               double alpha, double beta) {
  const Index m = phi.rows();
  const Index M = phi.cols();
  DenseReference r;
  r.B = Eigen::MatrixXd::Identity(m, m) / beta + phi.phi * phi.phi.transpose() / alpha;
  r.A = (alpha * Eigen::MatrixXd::Identity(M, M) + beta * phi.phi.transpose() * phi.phi)
            .inverse();
  r.mu = (phi.phi.transpose() * phi.phi + (alpha / beta) * Eigen::MatrixXd::Identity(M, M))
             .fullPivLu()
             .solve(phi.phi.transpose() * y);
  r.yBy = y.dot(r.B.inverse() * y);
  r.log_det_B = std::log(r.B.determinant());
  return r;
}

DesignMatrix identity_design(Index n) { return {Eigen::MatrixXd::Identity(n, n)}; }

}  // namespace

TEST_CASE("DegreesOfFreedom parsing and validation") {
  CHECK(DegreesOfFreedom::parse("inf").is_gaussian());
  CHECK(DegreesOfFreedom::parse("1e-8").value() == 1e-8);
  CHECK(DegreesOfFreedom::parse("+10").value() == 10.0);
  CHECK(DegreesOfFreedom::parse("inf").to_string() == "inf");
  CHECK_THROWS_AS(DegreesOfFreedom::parse("abc"), DomainError);
  CHECK_THROWS_AS(DegreesOfFreedom::parse("0"), DomainError);
  CHECK_THROWS_AS(DegreesOfFreedom::parse("-1"), DomainError);
  CHECK_THROWS_AS(DegreesOfFreedom{1e-13}, DomainError);
  CHECK(DegreesOfFreedom(1e-12).value() == 1e-12);
}

TEST_CASE("posterior_mean") {
  const Eigen::Vector3d y(1, -2, 4);
  const Precompute pre = precompute(identity_design(3), y);
  CHECK(rel_err(posterior_mean(pre, 3.0, 3.0), Eigen::VectorXd(y / 2)) <= 1e-15);

  Precompute zero = pre;
  zero.y_pV.setZero();
  CHECK(posterior_mean(zero, 1.0, 2.0).norm() == 0.0);

  const auto p = random_problem(30, 4, 101);
  const Precompute rp = precompute(p.phi, p.y);
  const Eigen::VectorXd dense =
      (p.phi.phi.transpose() * p.phi.phi + 0.4 * Eigen::MatrixXd::Identity(4, 4))
          .ldlt()
          .solve(p.phi.phi.transpose() * p.y);
  CHECK(rel_err(posterior_mean(rp, 2.0, 5.0), dense) <= 1e-10);

  CHECK_THROWS_AS(posterior_mean(rp, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(posterior_mean(rp, 1.0, -1.0), DomainError);
}

TEST_CASE("ridge equivalence on random instances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> log_u(-4.0, 4.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index M = 1 + static_cast<Index>(seed % 8);
    const auto p = random_problem(M + 5 + static_cast<Index>(seed), M, 200 + seed);
    const Precompute pre = precompute(p.phi, p.y);
    const double alpha = std::exp(log_u(rng));
    const double beta = std::exp(log_u(rng));
    const Eigen::VectorXd ridge =
        (p.phi.phi.transpose() * p.phi.phi + (alpha / beta) * Eigen::MatrixXd::Identity(M, M))
            .fullPivLu()
            .solve(p.phi.phi.transpose() * p.y);
    CAPTURE(seed);
    CHECK(rel_err(posterior_mean(pre, alpha, beta), ridge) <= 1e-10);
  }
}

TEST_CASE("quad_form_yBy") {
  const Eigen::Vector4d y(1, 2, -1, 0.5);
  const Precompute pre = precompute(identity_design(4), y);
  const double beta = 3.0;
  const Eigen::VectorXd mu = posterior_mean(pre, beta, beta);
  CHECK(quad_form_yBy(pre, mu, beta) == doctest::Approx(beta / 2 * y.squaredNorm()).epsilon(1e-14));

  const Precompute zero = precompute(identity_design(4), Eigen::Vector4d::Zero());
  CHECK(quad_form_yBy(zero, posterior_mean(zero, 1, 1), 1.0) == 0.0);

  const auto p = random_problem(20, 3, 7);
  const Precompute rp = precompute(p.phi, p.y);
  for (auto [alpha, beta] : {std::pair{0.3, 2.0}, std::pair{5.0, 0.1}, std::pair{1.0, 1.0}}) {
    const auto ref = dense_reference(p.phi, p.y, alpha, beta);
    CHECK(rel_err(quad_form_yBy(rp, posterior_mean(rp, alpha, beta), beta), ref.yBy) <= 1e-8);
  }

  // A μ that does not belong to (α, β) can push the value negative.
  CHECK_THROWS_AS(quad_form_yBy(pre, Eigen::VectorXd(10 * y), beta), NumericalError);
}

TEST_CASE("posterior_cov_traces") {
  const auto p = random_problem(20, 3, 9);
  const Precompute pre = precompute(p.phi, p.y);
  CHECK(posterior_cov_traces(pre, kGauss, 1.0, 2.0, 123.0).cov_scale == 1.0);

  const Precompute unit = precompute(identity_design(2), Eigen::Vector2d(1, 1));
  const auto t = posterior_cov_traces(unit, kGauss, 1.0, 1.0, 0.0);
  CHECK(t.tr_C == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.tr_PhiTPhi_C == doctest::Approx(1.0).epsilon(1e-15));

  const double alpha = 0.7, beta = 3.0;
  const DegreesOfFreedom nu(4.5);
  const auto ref = dense_reference(p.phi, p.y, alpha, beta);
  const double scale = (nu.value() + ref.yBy) / (nu.value() + 20.0);
  const auto traces = posterior_cov_traces(pre, nu, alpha, beta, ref.yBy);
  CHECK(traces.cov_scale == doctest::Approx(scale).epsilon(1e-14));
  CHECK(rel_err(traces.tr_C, scale * ref.A.trace()) <= 1e-10);
  CHECK(rel_err(traces.tr_PhiTPhi_C,
                scale * (p.phi.phi.transpose() * p.phi.phi * ref.A).trace()) <= 1e-10);
}

TEST_CASE("residual_norm_sq") {
  const auto p = random_problem(25, 4, 13);
  const Precompute pre = precompute(p.phi, p.y);
  CHECK(residual_norm_sq(pre, p.phi, Eigen::VectorXd::Zero(4)) ==
        doctest::Approx(p.y.squaredNorm()).epsilon(1e-14));

  const Eigen::Vector3d y(1, 2, 3);
  const Precompute ident = precompute(identity_design(3), y);
  CHECK(residual_norm_sq(ident, identity_design(3), y) == 0.0);

  const Eigen::VectorXd mu = posterior_mean(pre, 1.3, 0.8);
  CHECK(rel_err(residual_norm_sq(pre, p.phi, mu), (p.y - p.phi.phi * mu).squaredNorm()) <=
        1e-10);
  CHECK_THROWS_AS(residual_norm_sq(pre, p.phi, Eigen::VectorXd::Zero(3)), DataError);
}

TEST_CASE("e_step hand cases") {
  const DesignMatrix phi = identity_design(2);
  const Precompute pre = precompute(phi, Eigen::Vector2d(1, 1));

  const EStep gauss = e_step(pre, phi, kGauss, 1.0, 1.0);
  CHECK(rel_err(gauss.posterior.mu, Eigen::VectorXd(Eigen::Vector2d(0.5, 0.5))) <= 1e-15);
  CHECK(gauss.posterior.tr_C == doctest::Approx(1.0));
  CHECK(gauss.posterior.resid_sq == doctest::Approx(0.5));
  CHECK(gauss.posterior.tr_PhiTPhi_C == doctest::Approx(1.0));
  CHECK(gauss.stats.b == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(gauss.stats.c == doctest::Approx(1.5).epsilon(1e-15));

  const EStep student = e_step(pre, phi, DegreesOfFreedom(2.0), 1.0, 1.0);
  CHECK(student.posterior.yBy == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(student.posterior.cov_scale == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(student.stats.b == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(student.stats.c == doctest::Approx(1.25).epsilon(1e-15));

  // Dense cross-check of the ν = 2 case.
  const DensePosterior dense = posterior_dense(pre, phi, DegreesOfFreedom(2.0), 1.0, 1.0);
  CHECK(dense.mu.squaredNorm() + dense.C.trace() == doctest::Approx(1.25).epsilon(1e-14));
  CHECK((Eigen::Vector2d(1, 1) - dense.mu).squaredNorm() + dense.C.trace() ==
        doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("e_step with zero targets") {
  const auto p = random_problem(10, 3, 21);
  const Precompute pre = precompute(p.phi, Eigen::VectorXd::Zero(10));
  const EStep step = e_step(pre, p.phi, kGauss, 2.0, 3.0);
  CHECK(step.posterior.mu.norm() == 0.0);
  CHECK(step.stats.b == step.posterior.tr_C);
  CHECK(step.stats.c == step.posterior.tr_PhiTPhi_C);
  CHECK(step.stats.b > 0.0);
  CHECK(step.stats.c > 0.0);

  const DesignMatrix nothing{Eigen::MatrixXd::Zero(4, 2)};
  const Precompute degenerate = precompute(nothing, Eigen::VectorXd::Zero(4));
  CHECK_THROWS_AS(e_step(degenerate, nothing, kGauss, 1.0, 1.0), NumericalError);
}

TEST_CASE("m_step") {
  auto ab = m_step({2.0, 5.0}, 4, 10);
  CHECK(ab.alpha == 2.0);
  CHECK(ab.beta == 2.0);
  ab = m_step({1.0, 1.0}, 1, 1);
  CHECK(ab.alpha == 1.0);
  CHECK(ab.beta == 1.0);
  ab = m_step({1.5, 1.5}, 2, 2);
  CHECK(ab.alpha == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(ab.beta == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(m_step({0.0, 1.0}, 1, 1), DomainError);
}

TEST_CASE("log_evidence scalar cases") {
  const DesignMatrix phi{Eigen::MatrixXd::Ones(1, 1)};
  const Precompute pre = precompute(phi, Eigen::VectorXd::Zero(1));
  const double gauss = -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(2.0);
  CHECK(log_evidence(pre, kGauss, 1.0, 1.0) == doctest::Approx(gauss).epsilon(1e-14));
  CHECK(gauss == doctest::Approx(-1.26551).epsilon(1e-5));
  // St(0 | ν=2, 0, B=2) = Γ(3/2) / (Γ(1) √(2π) √2) = 1/4.
  CHECK(log_evidence(pre, DegreesOfFreedom(2.0), 1.0, 1.0) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("log_evidence matches a dense evaluation") {
  const auto p = random_problem(10, 3, 31);
  const Precompute pre = precompute(p.phi, p.y);
  for (double nu : {0.5, 3.0, 40.0}) {
    for (auto [alpha, beta] : {std::pair{0.2, 1.5}, std::pair{3.0, 0.4}}) {
      const auto ref = dense_reference(p.phi, p.y, alpha, beta);
      const double m = 10.0;
      const double dense = std::lgamma((nu + m) / 2) - std::lgamma(nu / 2) -
                           m / 2 * std::log(nu * std::numbers::pi) - 0.5 * ref.log_det_B -
                           (nu + m) / 2 * std::log(1 + ref.yBy / nu);
      CAPTURE(nu);
      CHECK(std::abs(log_evidence(pre, DegreesOfFreedom(nu), alpha, beta) - dense) <= 1e-8);
      CHECK(std::abs(log_det_B(pre, alpha, beta) - ref.log_det_B) <= 1e-8);
    }
  }
}

TEST_CASE("log_det_B with more features than rows") {
  const auto p = random_problem(4, 7, 41);
  const Precompute pre = precompute(p.phi, p.y);
  const auto ref = dense_reference(p.phi, p.y, 0.9, 2.5);
  CHECK(std::abs(log_det_B(pre, 0.9, 2.5) - ref.log_det_B) <= 1e-8);
  CHECK(std::abs(log_evidence(pre, kGauss, 0.9, 2.5) -
                 (-2.0 * std::log(2.0 * std::numbers::pi) - 0.5 * ref.log_det_B -
                  0.5 * ref.yBy)) <= 1e-8);
}

TEST_CASE("fit_qem on the 2x2 hand case") {
  const DesignMatrix phi = identity_design(2);
  const Precompute pre = precompute(phi, Eigen::Vector2d(1, 1));
  const FitResult gauss = fit_qem(pre, phi, kGauss);
  REQUIRE(gauss.converged);
  const EStep at = e_step(pre, phi, kGauss, gauss.hyperparams.alpha, gauss.hyperparams.beta);
  CHECK(rel_err(gauss.hyperparams.alpha, 2.0 / at.stats.b) <= 1e-6);
  CHECK(rel_err(gauss.hyperparams.beta, 2.0 / at.stats.c) <= 1e-6);
  // By symmetry α = β along the path and a -> 4a/(a+2), whose fixed point is 2.
  CHECK(rel_err(gauss.hyperparams.alpha, 2.0) <= 1e-6);
  CHECK(rel_err(gauss.hyperparams.beta, 2.0) <= 1e-6);

  const FitResult tiny = fit_qem(pre, phi, DegreesOfFreedom(0.01));
  REQUIRE(tiny.converged);
  CHECK(rel_err(tiny.hyperparams.alpha, gauss.hyperparams.alpha) <= 1e-5);
  CHECK(rel_err(tiny.hyperparams.beta, gauss.hyperparams.beta) <= 1e-5);
  CHECK(rel_err(tiny.mu, posterior_mean(pre, tiny.hyperparams.alpha, tiny.hyperparams.beta)) ==
        0.0);
}

TEST_CASE("fit_qem iteration bookkeeping") {
  const DesignMatrix phi = identity_design(2);
  const Precompute pre = precompute(phi, Eigen::Vector2d(1, 1));
  FitConfig one;
  one.max_iter = 1;
  const FitResult r = fit_qem(pre, phi, kGauss, one);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].alpha == 1.0);
  CHECK(r.trace[1].alpha == doctest::Approx(4.0 / 3.0));
  CHECK(r.hyperparams.alpha == r.trace[1].alpha);

  FitConfig bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(fit_qem(pre, phi, kGauss, bad), DomainError);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(fit_qem(pre, phi, kGauss, bad), DomainError);
}

TEST_CASE("fit_qem properties on random problems") {
  const std::vector<DegreesOfFreedom> nus = {DegreesOfFreedom(1e-8), DegreesOfFreedom(1e-2),
                                             DegreesOfFreedom(10.0), DegreesOfFreedom(1e4),
                                             kGauss};
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Index M = 2 + static_cast<Index>(seed % 5);
    const auto p = random_problem(60 + 10 * static_cast<Index>(seed), M, 300 + seed);
    const Precompute pre = precompute(p.phi, p.y);
    CAPTURE(seed);

    std::vector<FitResult> fits;
    for (const auto nu : nus) {
      fits.push_back(fit_qem(pre, p.phi, nu));
      const FitResult& f = fits.back();
      REQUIRE(f.converged);
      CHECK(f.trace.size() == f.iterations + 1);
      // Evidence ascent.
      for (std::size_t i = 1; i < f.trace.size(); ++i) {
        const double prev = f.trace[i - 1].log_evidence;
        CHECK(f.trace[i].log_evidence - prev >= -1e-9 * std::abs(prev));
      }
      // Fixed point.
      const EStep at = e_step(pre, p.phi, nu, f.hyperparams.alpha, f.hyperparams.beta);
      CHECK(std::abs(f.hyperparams.alpha * at.stats.b - M) <= 1e-5 * M);
      CHECK(std::abs(f.hyperparams.beta * at.stats.c - pre.m) <= 1e-5 * pre.m);
    }
    // The fixed point does not depend on ν.
    for (const auto& f : fits) {
      CHECK(rel_err(f.hyperparams.alpha, fits.back().hyperparams.alpha) <= 1e-5);
      CHECK(rel_err(f.hyperparams.beta, fits.back().hyperparams.beta) <= 1e-5);
    }
  }
}

TEST_CASE("scaling the targets rescales beta and keeps gamma") {
  const auto p = random_problem(80, 4, 77);
  FitConfig tight;
  tight.rel_tol = 1e-12;
  const FitResult base = fit_qem(precompute(p.phi, p.y), p.phi, kGauss, tight);
  for (double s : {0.1, 7.0}) {
    const FitResult scaled = fit_qem(precompute(p.phi, s * p.y), p.phi, kGauss, tight);
    REQUIRE(scaled.converged);
    CAPTURE(s);
    CHECK(rel_err(scaled.hyperparams.beta / scaled.hyperparams.alpha,
                  base.hyperparams.beta / base.hyperparams.alpha) <= 1e-4);
    CHECK(rel_err(scaled.hyperparams.beta, base.hyperparams.beta / (s * s)) <= 1e-4);
  }
}

TEST_CASE("predict") {
  const Eigen::Vector3d mu(1, -2, 0.5);
  CHECK(predict(Eigen::Vector3d::Zero(), Eigen::MatrixXd::Ones(4, 3)).norm() == 0.0);
  CHECK(predict(mu, Eigen::Matrix3d::Identity()) == Eigen::VectorXd(mu));
  CHECK_THROWS_AS(predict(mu, Eigen::MatrixXd::Ones(2, 2)), DataError);

  // A training row pushed back through the stored normalization.
  std::mt19937_64 rng(4);
  Dataset d{blrs::testing::random_matrix(40, 3, rng) * 5.0, blrs::testing::random_vector(40, rng), {}};
  const auto [phi, report] = normalize_columns(d);
  const Precompute pre = precompute(phi, d.targets);
  const FitResult fit = fit_qem(pre, phi, kGauss);
  const Eigen::VectorXd fitted = phi.phi * fit.mu;
  const Eigen::VectorXd again = predict(fit.mu, report.apply(d.features.topRows(5)));
  CHECK((again - fitted.head(5)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("posterior_dense") {
  const DesignMatrix zero{Eigen::MatrixXd::Zero(5, 3)};
  const Precompute zp = precompute(zero, Eigen::VectorXd::Ones(5));
  const DensePosterior z = posterior_dense(zp, zero, kGauss, 4.0, 1.0);
  CHECK((z.A - 0.25 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(z.mu.norm() == 0.0);

  const DesignMatrix ident = identity_design(3);
  const Precompute ip = precompute(ident, Eigen::Vector3d(1, 2, 3));
  const DensePosterior i = posterior_dense(ip, ident, kGauss, 1.0, 1.0);
  CHECK((i.A - 0.5 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);

  const auto p = random_problem(25, 5, 55);
  const Precompute pre = precompute(p.phi, p.y);
  for (const auto nu : {DegreesOfFreedom(0.3), kGauss}) {
    const DensePosterior dense = posterior_dense(pre, p.phi, nu, 0.6, 1.7);
    const EStep step = e_step(pre, p.phi, nu, 0.6, 1.7);
    CHECK(rel_err(dense.C.trace(), step.posterior.tr_C) <= 1e-10);
    CHECK(rel_err((p.phi.phi.transpose() * p.phi.phi * dense.C).trace(),
                  step.posterior.tr_PhiTPhi_C) <= 1e-10);
    CHECK(rel_err(dense.mu, step.posterior.mu) <= 1e-10);
  }
}

TEST_CASE("dense and spectral paths agree") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> log_u(-3.0, 3.0);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index M = 1 + static_cast<Index>(rng() % 8);
    const Index m = M + 1 + static_cast<Index>(rng() % 40);
    const auto p = random_problem(m, M, 1000 + seed);
    const Precompute pre = precompute(p.phi, p.y);
    const double alpha = std::exp(log_u(rng));
    const double beta = std::exp(log_u(rng));
    const DegreesOfFreedom nu(std::exp(2.0 * log_u(rng)));
    const auto ref = dense_reference(p.phi, p.y, alpha, beta);
    const EStep step = e_step(pre, p.phi, nu, alpha, beta);
    const double scale = (nu.value() + ref.yBy) / (nu.value() + static_cast<double>(m));
    CAPTURE(seed);
    CHECK(rel_err(step.posterior.mu, ref.mu) <= 1e-8);
    CHECK(rel_err(step.posterior.yBy, ref.yBy) <= 1e-8);
    CHECK(rel_err(step.posterior.tr_C, scale * ref.A.trace()) <= 1e-8);
    CHECK(rel_err(log_det_B(pre, alpha, beta), ref.log_det_B) <= 1e-8);
  }
}

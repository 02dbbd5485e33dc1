#include <algorithm>
#include <cmath>
#include <numeric>

#include "blrs/data.hpp"
#include "blrs/errors.hpp"

namespace blrs {

namespace {

double off_diagonal_norm(const MatrixXd& a) {
  double sum = 0.0;
  for (Index q = 1; q < a.cols(); ++q) {
    for (Index p = 0; p < q; ++p) sum += 2.0 * a(p, q) * a(p, q);
  }
  return std::sqrt(sum);
}

// A <- J^T A J, V <- V J for the rotation that zeroes a(p, q).
void rotate(MatrixXd& a, MatrixXd& v, Index p, Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen sym_eigendecompose(const MatrixXd& S) {
  if (S.rows() != S.cols()) throw DataError("eigendecomposition needs a square matrix");
  if (!S.allFinite()) throw DataError("eigendecomposition input is not finite");

  const Index n = S.rows();
  MatrixXd a = 0.5 * (S + S.transpose());
  MatrixXd v = MatrixXd::Identity(n, n);
  const double threshold = kJacobiRelativeThreshold * a.norm();

  int sweeps = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweeps == kJacobiSweepBudget) {
      throw NumericalError("Jacobi eigensolver did not converge in " +
                           std::to_string(kJacobiSweepBudget) + " sweeps");
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) rotate(a, v, p, q);
      }
    }
    ++sweeps;
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    Index pivot = 0;
    v.col(src).cwiseAbs().maxCoeff(&pivot);
    out.vectors.col(k) = v(pivot, src) < 0.0 ? VectorXd(-v.col(src)) : VectorXd(v.col(src));
  }
  return out;
}

}  // namespace blrs

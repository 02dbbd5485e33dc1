#include "blrs/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "blrs/errors.hpp"

namespace blrs {

Dataset generate_synthetic(Index m, Index M, double alpha_true, double beta_true,
                           std::uint64_t seed) {
  if (M < 1 || m <= M) throw DomainError("synthetic data needs m > M >= 1");
  if (!(alpha_true > 0.0) || !(beta_true > 0.0)) {
    throw DomainError("synthetic precisions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset d;
  d.features.resize(m, M);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < M; ++j) d.features(i, j) = normal(rng);
  }
  VectorXd w(M);
  for (Index j = 0; j < M; ++j) w(j) = normal(rng) / std::sqrt(alpha_true);
  d.targets = d.features * w;
  for (Index i = 0; i < m; ++i) d.targets(i) += normal(rng) / std::sqrt(beta_true);
  for (Index j = 0; j < M; ++j) d.column_names.push_back("x" + std::to_string(j + 1));
  return d;
}

void write_csv(const Dataset& d, std::ostream& out) {
  for (Index j = 0; j < d.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    out << (k < d.column_names.size() ? d.column_names[k] : "x" + std::to_string(j + 1))
        << ',';
  }
  out << "y\n";
  char buf[32];
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", d.features(i, j));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", d.targets(i));
    out << buf;
  }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(d, out);
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace blrs

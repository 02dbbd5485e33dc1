#include <algorithm>
#include <cmath>
#include <fstream>

#include "blrs/data.hpp"
#include "blrs/errors.hpp"

namespace blrs {

namespace {

// Centered column norms at or below this fraction of the raw column norm
// count as constant.
constexpr double kConstantColumnTolerance = 1e-12;

constexpr double kNegativeEigenvalueSlack = 1e-10;

}  // namespace

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    throw DataError("dataset needs at least one row and one feature column");
  }
  if (targets.size() != features.rows()) {
    throw DataError("target length " + std::to_string(targets.size()) +
                    " does not match " + std::to_string(features.rows()) +
                    " feature rows");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw DataError("dataset contains non-finite values");
  }
}

Dataset load_csv(std::istream& in, const std::string& target_column,
                 bool has_header, std::vector<std::string> ignore_columns) {
  CsvOptions options;
  options.has_header = has_header;
  options.ignore_columns = std::move(ignore_columns);
  CsvTable table = read_csv(in, options);

  const Index target =
      find_column(table.column_names, table.values.cols(), target_column);
  if (target < 0) throw DataError("unknown target column: " + target_column);
  if (table.values.cols() < 2) {
    throw DataError("need at least one feature column besides the target");
  }

  Dataset d;
  d.targets = table.values.col(target);
  d.features.resize(table.values.rows(), table.values.cols() - 1);
  for (Index j = 0, k = 0; j < table.values.cols(); ++j) {
    if (j == target) continue;
    d.features.col(k++) = table.values.col(j);
    if (!table.column_names.empty()) {
      d.column_names.push_back(table.column_names[static_cast<std::size_t>(j)]);
    }
  }
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::string& target_column, bool has_header,
                 std::vector<std::string> ignore_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return load_csv(in, target_column, has_header, std::move(ignore_columns));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Dataset select_rows(const Dataset& d, const std::vector<Index>& rows) {
  Dataset out;
  out.column_names = d.column_names;
  out.features = d.features(rows, Eigen::all);
  out.targets = d.targets(rows);
  return out;
}

Index NormalizationReport::retained_columns() const {
  return input_columns() - static_cast<Index>(dropped_columns.size());
}

MatrixXd NormalizationReport::apply(const MatrixXd& raw) const {
  if (raw.cols() != input_columns()) {
    throw DataError("expected " + std::to_string(input_columns()) +
                    " feature columns, found " + std::to_string(raw.cols()));
  }
  MatrixXd out(raw.rows(), retained_columns());
  for (Index j = 0, k = 0; j < raw.cols(); ++j) {
    if (std::find(dropped_columns.begin(), dropped_columns.end(), j) !=
        dropped_columns.end()) {
      continue;
    }
    out.col(k++) = (raw.col(j).array() - means(j)) / norms(j);
  }
  return out;
}

std::pair<DesignMatrix, NormalizationReport> normalize_columns(const Dataset& d) {
  d.validate();
  if (d.rows() < 2) throw DataError("normalization needs at least two rows");

  const Index n = d.cols();
  NormalizationReport report;
  report.means.resize(n);
  report.norms.setZero(n);

  std::vector<VectorXd> retained;
  for (Index j = 0; j < n; ++j) {
    const double mean = d.features.col(j).mean();
    VectorXd centered = d.features.col(j).array() - mean;
    const double norm = centered.norm();
    report.means(j) = mean;
    if (norm <= kConstantColumnTolerance * std::max(1.0, d.features.col(j).norm())) {
      report.dropped_columns.push_back(j);
      continue;
    }
    report.norms(j) = norm;
    retained.push_back(centered.array() / norm);
  }
  if (retained.empty()) throw DataError("all feature columns are constant");

  DesignMatrix design;
  design.phi.resize(d.rows(), static_cast<Index>(retained.size()));
  for (std::size_t k = 0; k < retained.size(); ++k) {
    design.phi.col(static_cast<Index>(k)) = retained[k];
  }
  return {std::move(design), std::move(report)};
}

Precompute precompute(const DesignMatrix& phi, const VectorXd& y) {
  if (phi.rows() != y.size()) {
    throw DataError("design matrix has " + std::to_string(phi.rows()) +
                    " rows but target has " + std::to_string(y.size()));
  }
  if (phi.rows() < 1 || phi.cols() < 1) throw DataError("empty design matrix");
  if (!phi.phi.allFinite() || !y.allFinite()) {
    throw DataError("design matrix or target has non-finite entries");
  }

  const MatrixXd gram = phi.phi.transpose() * phi.phi;
  SymmetricEigen eig = sym_eigendecompose(gram);

  const double slack =
      kNegativeEigenvalueSlack * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < eig.values.size(); ++i) {
    double& lambda = eig.values(i);
    if (lambda < -slack) {
      throw NumericalError("Gram matrix has negative eigenvalue " +
                           std::to_string(lambda));
    }
    lambda = std::max(lambda, 0.0);
  }

  Precompute pre;
  pre.V = std::move(eig.vectors);
  pre.D = std::move(eig.values);
  pre.y_p = phi.phi.transpose() * y;
  pre.y_pV = pre.V.transpose() * pre.y_p;
  pre.y_norm_sq = y.squaredNorm();
  pre.m = phi.rows();
  pre.M = phi.cols();
  return pre;
}

}  // namespace blrs

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace blrs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A rectangular block of numeric CSV cells plus its header (if any).
struct CsvTable {
  std::vector<std::string> column_names;  // empty without a header row
  MatrixXd values;
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  /// Columns skipped entirely (by header name or 0-based index).
  std::vector<std::string> ignore_columns;
};

/// Parses RFC-4180-style records. Every retained cell must be a finite number;
/// errors name the 1-based line and the column.
CsvTable read_csv(std::istream& in, const CsvOptions& options = {});
CsvTable read_csv(const std::filesystem::path& path,
                  const CsvOptions& options = {});

/// Resolves a column reference: a header name first, otherwise a 0-based index.
/// Returns -1 if neither matches.
Index find_column(const std::vector<std::string>& names, Index column_count,
                  const std::string& ref);

struct Dataset {
  MatrixXd features;  // m x n
  VectorXd targets;   // m
  std::vector<std::string> column_names;

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }

  /// Throws DataError unless m >= 1, n >= 1, shapes agree and all entries are
  /// finite.
  void validate() const;
};

Dataset load_csv(const std::filesystem::path& path,
                 const std::string& target_column, bool has_header = true,
                 std::vector<std::string> ignore_columns = {});
Dataset load_csv(std::istream& in, const std::string& target_column,
                 bool has_header = true,
                 std::vector<std::string> ignore_columns = {});

/// Rows of a dataset, in the given order.
Dataset select_rows(const Dataset& d, const std::vector<Index>& rows);

enum class Basis { identity };

struct DesignMatrix {
  MatrixXd phi;  // m x M
  Basis basis = Basis::identity;

  Index rows() const { return phi.rows(); }
  Index cols() const { return phi.cols(); }
  /// M > m is permitted; downstream spectra then carry trailing zeros.
  bool underdetermined() const { return phi.cols() > phi.rows(); }
};

/// Column statistics of the training features. means/norms cover every
/// original feature column; dropped columns keep their mean and a zero norm.
struct NormalizationReport {
  VectorXd means;
  VectorXd norms;
  std::vector<Index> dropped_columns;

  Index input_columns() const { return means.size(); }
  Index retained_columns() const;

  /// Applies the stored statistics to raw rows with the original column
  /// layout, dropping the dropped columns.
  MatrixXd apply(const MatrixXd& raw) const;
};

/// Centers every feature column and scales it to unit Euclidean length.
/// Constant columns are dropped and reported.
std::pair<DesignMatrix, NormalizationReport> normalize_columns(const Dataset& d);

struct SymmetricEigen {
  MatrixXd vectors;  // columns are eigenvectors
  VectorXd values;   // descending
  int sweeps = 0;
};

inline constexpr int kJacobiSweepBudget = 100;
inline constexpr double kJacobiRelativeThreshold = 1e-12;

/// Cyclic Jacobi on (S + S^T)/2. Eigenvalues sorted descending (stable), and
/// each eigenvector's largest-magnitude entry made positive.
SymmetricEigen sym_eigendecompose(const MatrixXd& S);

/// One-time spectral summary of (Φ, y) shared by every fit iteration.
struct Precompute {
  MatrixXd V;  // eigenvectors of Φ^T Φ
  VectorXd D;  // eigenvalues, descending, >= 0
  VectorXd y_p;   // Φ^T y
  VectorXd y_pV;  // V^T y_p
  double y_norm_sq = 0.0;
  Index m = 0;
  Index M = 0;
};

/// Eigenvalues in [-1e-10 * max(1, |D|max), 0) are clamped to zero; anything
/// more negative throws NumericalError.
Precompute precompute(const DesignMatrix& phi, const VectorXd& y);

}  // namespace blrs

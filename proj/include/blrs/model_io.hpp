#pragma once

#include <filesystem>
#include <string>

#include "blrs/core.hpp"

namespace blrs {

/// A fitted model as persisted on disk:
///   {nu, alpha, beta, mu[], normalization{means[], norms[], dropped[]},
///    iterations, converged}
/// ν = ∞ is written as the string "inf".
struct FittedModel {
  DegreesOfFreedom nu = DegreesOfFreedom::gaussian();
  double alpha = 0.0;
  double beta = 0.0;
  VectorXd mu;
  NormalizationReport normalization;
  std::size_t iterations = 0;
  bool converged = false;

  /// Normalizes raw feature rows with the stored statistics and applies μ.
  VectorXd predict_raw(const MatrixXd& raw_features) const;
};

std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);

void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace blrs

#include "blrs/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "blrs/errors.hpp"

namespace blrs {

using nlohmann::json;

namespace {

json to_array(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd from_array(const json& j, const char* field) {
  if (!j.is_array()) throw DataError(std::string("model field '") + field + "' must be an array");
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw DataError(std::string("model field '") + field + "' has a non-numeric entry");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) throw DataError(std::string("model is missing field '") + field + "'");
  return *it;
}

}  // namespace

VectorXd FittedModel::predict_raw(const MatrixXd& raw_features) const {
  return predict(mu, normalization.apply(raw_features));
}

std::string model_to_json(const FittedModel& model) {
  json j;
  if (model.nu.is_gaussian()) {
    j["nu"] = "inf";
  } else {
    j["nu"] = model.nu.value();
  }
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["mu"] = to_array(model.mu);
  j["normalization"] = {
      {"means", to_array(model.normalization.means)},
      {"norms", to_array(model.normalization.norms)},
      {"dropped", model.normalization.dropped_columns},
  };
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  return j.dump(2);
}

FittedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("model must be a JSON object");

  FittedModel model;
  try {
    const json& nu = require(j, "nu");
    model.nu = nu.is_string() ? DegreesOfFreedom::parse(nu.get<std::string>())
                              : DegreesOfFreedom(nu.get<double>());
    model.alpha = require(j, "alpha").get<double>();
    model.beta = require(j, "beta").get<double>();
    model.mu = from_array(require(j, "mu"), "mu");
    const json& norm = require(j, "normalization");
    model.normalization.means = from_array(require(norm, "means"), "means");
    model.normalization.norms = from_array(require(norm, "norms"), "norms");
    model.normalization.dropped_columns =
        require(norm, "dropped").get<std::vector<Index>>();
    model.iterations = require(j, "iterations").get<std::size_t>();
    model.converged = require(j, "converged").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  } catch (const DomainError& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }

  const auto& report = model.normalization;
  if (report.norms.size() != report.means.size()) {
    throw DataError("model normalization means/norms differ in length");
  }
  for (Index d : report.dropped_columns) {
    if (d < 0 || d >= report.input_columns()) {
      throw DataError("model drops a column outside the feature range");
    }
  }
  if (report.retained_columns() != model.mu.size()) {
    throw DataError("model mu has " + std::to_string(model.mu.size()) +
                    " weights but normalization retains " +
                    std::to_string(report.retained_columns()) + " columns");
  }
  return model;
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return model_from_json(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace blrs

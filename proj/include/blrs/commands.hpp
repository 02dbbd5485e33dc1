#pragma once

// Subcommands of the `blrs` executable, callable in-process.
// Exit codes: 0 success, 1 I/O or data error, 2 non-convergence.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace blrs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitNotConverged = 2;

struct FitOptions {
  std::filesystem::path input;
  std::string target;
  std::string nu = "inf";
  std::string solver = "qem";  // qem | oracle
  std::filesystem::path out;
  double rel_tol = 1e-7;
  std::size_t max_iter = 10000;
  std::vector<std::string> drop;  // input columns ignored entirely
};

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path input;
  std::filesystem::path out;
  std::string target;  // optional: column excluded before prediction
  std::vector<std::string> drop;
};

struct BenchmarkOptions {
  std::filesystem::path input;
  std::string target;
  std::vector<std::string> nus = {"1e-8", "1e-5", "1e-2", "10", "1e4", "inf"};
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  std::size_t trial = 0;  // 0 runs every trial
  double rel_tol = 1e-7;
  std::size_t max_iter = 10000;
  std::vector<std::string> drop;
};

struct SyntheticOptions {
  long long rows = 0;
  long long features = 0;
  double alpha = 1.0;
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);
int run_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err);
int run_gen_synthetic(const SyntheticOptions& options, std::ostream& out,
                      std::ostream& err);

}  // namespace blrs::cli

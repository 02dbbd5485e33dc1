#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blrs/core.hpp"

namespace blrs::bench {

/// xorshift64* seeded through splitmix64; a UniformRandomBitGenerator.
class XorShift64Star {
 public:
  using result_type = std::uint64_t;

  explicit XorShift64Star(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

struct SplitSpec {
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  std::size_t trial = 1;  // 1-based; this fold is held out

  void validate() const;
};

struct FoldSplit {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Seeded Fisher-Yates shuffle of the row indices, cut into contiguous folds.
FoldSplit fold_split(Index rows, const SplitSpec& spec);

struct BenchmarkRow {
  DegreesOfFreedom nu = DegreesOfFreedom::gaussian();
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t cnt = 0;
  bool converged = false;
  double wall_time_ms = 0.0;
};

struct TrialResult {
  std::size_t trial = 0;
  Index train_rows = 0;
  Index features = 0;
  std::vector<BenchmarkRow> rows;  // in requested ν order
};

std::vector<DegreesOfFreedom> default_nus();

/// Fits every ν concurrently on a shared Precompute.
std::vector<BenchmarkRow> sweep_nu(const Precompute& pre, const DesignMatrix& phi,
                                   const std::vector<DegreesOfFreedom>& nus,
                                   const FitConfig& config);

/// Normalizes the training folds and runs sweep_nu on them.
TrialResult run_trial(const Dataset& data, const std::vector<DegreesOfFreedom>& nus,
                      const SplitSpec& split, const FitConfig& config);

/// (cnt(ν=∞) − cnt(min finite ν)) / cnt(ν=∞) in percent; empty unless both
/// rows are present and converged.
std::optional<double> speedup_percent(const std::vector<BenchmarkRow>& rows);

std::string format_nu(DegreesOfFreedom nu);
/// "%.9E": ten significant digits.
std::string format_value(double value);
std::string format_trial(const TrialResult& result);

}  // namespace blrs::bench

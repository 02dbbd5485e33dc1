#include "blrs/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <future>
#include <numeric>
#include <sstream>

#include "blrs/errors.hpp"

namespace blrs::bench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

XorShift64Star::XorShift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

XorShift64Star::result_type XorShift64Star::operator()() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

std::uint64_t XorShift64Star::below(std::uint64_t bound) {
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t draw;
  do {
    draw = (*this)();
  } while (draw >= limit);
  return draw % bound;
}

void SplitSpec::validate() const {
  if (folds < 2) throw DomainError("folds must be at least 2");
  if (trial < 1 || trial > folds) {
    throw DomainError("trial must lie in [1, " + std::to_string(folds) + "]");
  }
}

FoldSplit fold_split(Index rows, const SplitSpec& spec) {
  spec.validate();
  const auto folds = static_cast<Index>(spec.folds);
  if (rows < folds) {
    throw DataError("dataset has " + std::to_string(rows) + " rows, fewer than " +
                    std::to_string(folds) + " folds");
  }
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  XorShift64Star rng(spec.seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  const auto held = static_cast<Index>(spec.trial) - 1;
  const Index begin = held * rows / folds;
  const Index end = (held + 1) * rows / folds;
  FoldSplit split;
  for (Index i = 0; i < rows; ++i) {
    auto& target = (i >= begin && i < end) ? split.test : split.train;
    target.push_back(order[static_cast<std::size_t>(i)]);
  }
  return split;
}

std::vector<DegreesOfFreedom> default_nus() {
  return {DegreesOfFreedom(1e-8), DegreesOfFreedom(1e-5), DegreesOfFreedom(1e-2),
          DegreesOfFreedom(10.0), DegreesOfFreedom(1e4), DegreesOfFreedom::gaussian()};
}

std::vector<BenchmarkRow> sweep_nu(const Precompute& pre, const DesignMatrix& phi,
                                   const std::vector<DegreesOfFreedom>& nus,
                                   const FitConfig& config) {
  std::vector<std::future<BenchmarkRow>> pending;
  pending.reserve(nus.size());
  for (const DegreesOfFreedom nu : nus) {
    pending.push_back(std::async(std::launch::async, [&pre, &phi, &config, nu] {
      const auto start = std::chrono::steady_clock::now();
      const FitResult fit = fit_qem(pre, phi, nu, config);
      const auto stop = std::chrono::steady_clock::now();
      BenchmarkRow row;
      row.nu = nu;
      row.alpha = fit.hyperparams.alpha;
      row.beta = fit.hyperparams.beta;
      row.cnt = fit.iterations;
      row.converged = fit.converged;
      row.wall_time_ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
      return row;
    }));
  }
  std::vector<BenchmarkRow> rows;
  rows.reserve(nus.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

TrialResult run_trial(const Dataset& data, const std::vector<DegreesOfFreedom>& nus,
                      const SplitSpec& split, const FitConfig& config) {
  const FoldSplit folds = fold_split(data.rows(), split);
  const Dataset train = select_rows(data, folds.train);
  const auto [phi, report] = normalize_columns(train);
  const Precompute pre = precompute(phi, train.targets);

  TrialResult result;
  result.trial = split.trial;
  result.train_rows = train.rows();
  result.features = phi.cols();
  result.rows = sweep_nu(pre, phi, nus, config);
  return result;
}

std::optional<double> speedup_percent(const std::vector<BenchmarkRow>& rows) {
  const BenchmarkRow* gaussian = nullptr;
  const BenchmarkRow* smallest = nullptr;
  for (const auto& row : rows) {
    if (row.nu.is_gaussian()) {
      gaussian = &row;
    } else if (!smallest || row.nu.value() < smallest->nu.value()) {
      smallest = &row;
    }
  }
  if (!gaussian || !smallest || !gaussian->converged || !smallest->converged) {
    return std::nullopt;
  }
  const auto base = static_cast<double>(gaussian->cnt);
  return 100.0 * (base - static_cast<double>(smallest->cnt)) / base;
}

std::string format_nu(DegreesOfFreedom nu) {
  if (nu.is_gaussian()) return "+inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1E", nu.value());
  return buf;
}

std::string format_value(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9E", value);
  return buf;
}

std::string format_trial(const TrialResult& result) {
  std::ostringstream os;
  char line[160];
  os << "Trial " << result.trial << " (m=" << result.train_rows
     << ", M=" << result.features << ")\n";
  std::snprintf(line, sizeof line, "%-9s %-16s %-16s %s\n", "nu", "alpha", "beta", "cnt");
  os << line;
  for (const auto& row : result.rows) {
    const std::string cnt = row.converged ? std::to_string(row.cnt) : "DNC";
    std::snprintf(line, sizeof line, "%-9s %-16s %-16s %s\n", format_nu(row.nu).c_str(),
                  format_value(row.alpha).c_str(), format_value(row.beta).c_str(),
                  cnt.c_str());
    os << line;
  }
  if (const auto speedup = speedup_percent(result.rows)) {
    const auto smallest = std::min_element(
        result.rows.begin(), result.rows.end(), [](const auto& a, const auto& b) {
          return a.nu.value() < b.nu.value();
        });
    std::snprintf(line, sizeof line, "speedup (cnt at nu=%s vs nu=+inf): %.1f%%\n",
                  format_nu(smallest->nu).c_str(), *speedup);
    os << line;
  } else {
    os << "speedup: n/a\n";
  }
  return os.str();
}

}  // namespace blrs::bench

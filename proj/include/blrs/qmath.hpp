#pragma once

// Tsallis-deformed exponential/logarithm and the 1-D Tsallis divergence.
//
//   exp_q(x) = [1 + (1-q) x]_+^{1/(1-q)}      (exp(x) at q = 1)
//   ln_q(x)  = (x^{1-q} - 1) / (1-q)          (ln(x)  at q = 1)
//   D_q(p||t) = (∫ p^q t^{1-q} - 1) / (q-1)   (KL at q = 1)

#include <functional>

namespace blrs::qmath {

/// |q - 1| at or below this routes to the ordinary exp/ln/KL branch.
inline constexpr double kUnitIndexTolerance = 1e-12;

inline constexpr int kDefaultGridPoints = 4096;

class EntropicIndex {
 public:
  explicit EntropicIndex(double q);

  double value() const noexcept { return q_; }
  bool is_unit() const noexcept;

 private:
  double q_;
};

/// A probability density on a bounded interval, evaluated pointwise.
struct Density1D {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 0.0;
};

double q_exp(double q, double x);
double q_log(double q, double x);

/// Composite Simpson rule on a uniform grid. An even point count is bumped by
/// one so that the number of intervals is even.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               int grid_points);

/// Requires q > 0, both densities on the same support and normalized to
/// within 1e-6, and grid_points >= 64.
double tsallis_divergence_1d(const Density1D& p, const Density1D& t,
                             EntropicIndex q,
                             int grid_points = kDefaultGridPoints);

}  // namespace blrs::qmath

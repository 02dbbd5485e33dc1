#include "blrs/qmath.hpp"

#include <cmath>
#include <string>

#include "blrs/errors.hpp"

namespace blrs::qmath {

namespace {

constexpr double kNormalizationTolerance = 1e-6;

bool near_unit(double q) { return std::abs(q - 1.0) <= kUnitIndexTolerance; }

}  // namespace

EntropicIndex::EntropicIndex(double q) : q_(q) {
  if (!std::isfinite(q)) {
    throw DomainError("entropic index must be finite");
  }
}

bool EntropicIndex::is_unit() const noexcept { return near_unit(q_); }

double q_exp(double q, double x) {
  if (!std::isfinite(q) || !std::isfinite(x)) {
    throw DomainError("q_exp: arguments must be finite");
  }
  if (near_unit(q)) return std::exp(x);

  const double one_minus_q = 1.0 - q;
  const double base = 1.0 + one_minus_q * x;
  if (base <= 0.0) {
    // [.]_+ clips to zero; 0^{1/(1-q)} is 0 for a positive exponent only.
    if (one_minus_q > 0.0) return 0.0;
    throw DomainError("q_exp: zero base raised to a negative power (q=" +
                      std::to_string(q) + ", x=" + std::to_string(x) + ")");
  }
  return std::exp(std::log1p(one_minus_q * x) / one_minus_q);
}

double q_log(double q, double x) {
  if (!(x > 0.0)) {
    throw DomainError("q_log: argument must be positive");
  }
  if (near_unit(q)) return std::log(x);
  const double one_minus_q = 1.0 - q;
  return std::expm1(one_minus_q * std::log(x)) / one_minus_q;
}

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int grid_points) {
  if (grid_points < 3) {
    throw DomainError("simpson: need at least 3 grid points");
  }
  if (grid_points % 2 == 0) ++grid_points;
  const int intervals = grid_points - 1;
  const double h = (hi - lo) / intervals;

  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  }
  return sum * h / 3.0;
}

double tsallis_divergence_1d(const Density1D& p, const Density1D& t,
                             EntropicIndex q, int grid_points) {
  const double qv = q.value();
  if (!(qv > 0.0)) {
    throw DomainError("tsallis_divergence_1d: requires q > 0");
  }
  if (grid_points < 64) {
    throw DomainError("tsallis_divergence_1d: requires at least 64 grid points");
  }
  if (p.lo != t.lo || p.hi != t.hi || !(p.hi > p.lo)) {
    throw DomainError("tsallis_divergence_1d: densities need a shared support");
  }

  for (const Density1D* d : {&p, &t}) {
    const double mass = simpson(d->pdf, d->lo, d->hi, grid_points);
    if (std::abs(mass - 1.0) > kNormalizationTolerance) {
      throw DomainError("tsallis_divergence_1d: density not normalized (mass " +
                        std::to_string(mass) + ")");
    }
  }

  const bool unit = q.is_unit();
  // Integrates p * (p/t)^{q-1} - p, i.e. p^q t^{1-q} - p, through expm1 so that
  // the q -> 1 approach keeps its precision. At q = 1 it integrates p ln(p/t).
  auto integrand = [&](double x) {
    const double px = p.pdf(x);
    const double tx = t.pdf(x);
    if (!(px >= 0.0) || !(tx >= 0.0)) {
      throw NumericalError("tsallis_divergence_1d: negative or NaN density");
    }
    if (px == 0.0) return 0.0;
    if (tx == 0.0) {
      if (!unit && qv < 1.0) return -px;
      throw NumericalError("tsallis_divergence_1d: integrand not finite on grid");
    }
    const double log_ratio = std::log(px) - std::log(tx);
    const double value =
        unit ? px * log_ratio : px * std::expm1((qv - 1.0) * log_ratio);
    if (!std::isfinite(value)) {
      throw NumericalError("tsallis_divergence_1d: integrand not finite on grid");
    }
    return value;
  };

  const double integral = simpson(integrand, p.lo, p.hi, grid_points);
  return unit ? integral : integral / (qv - 1.0);
}

}  // namespace blrs::qmath

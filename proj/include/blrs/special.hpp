#pragma once

namespace blrs {

/// ln Γ(x) for x > 0. Lanczos (g = 7, 9 terms) for x >= 0.5, reflection below.
/// Reentrant, unlike std::lgamma, which writes the global signgam.
double log_gamma(double x);

}  // namespace blrs

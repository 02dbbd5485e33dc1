#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>

#include "blrs/data.hpp"

namespace blrs {

/// Draws X with standard normal entries, w ~ N(0, α⁻¹I) and
/// y = Xw + ε, ε ~ N(0, β⁻¹I). Deterministic for a fixed seed.
/// Requires m > M >= 1 and positive precisions.
Dataset generate_synthetic(Index m, Index M, double alpha_true, double beta_true,
                           std::uint64_t seed);

/// Header x1..xM,y; values at round-trip precision.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

}  // namespace blrs

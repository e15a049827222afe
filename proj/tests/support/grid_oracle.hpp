#pragma once

#include <optional>
#include <span>

#include "acp/allocator.hpp"

namespace acp::testing {

struct GridSolution {
  double objective = 0;  // sum W f^2 at the best grid point
  double f1 = 0, f2 = 0;
};

// Independent optimum for the 2-pair allocation: the bandwidth constraint is
// active at any optimum of a strictly feasible instance, so the feasible set
// reduces to a curve parametrized by f1; f2 follows by closing the
// constraint exactly. Scans f1, then zooms `levels` times around the best
// point. Returns nullopt when no grid point is feasible (caps too tight).
std::optional<GridSolution> grid_best_two_pair(std::span<const PairCoefficients> coeffs,
                                               int points_per_level = 2000, int levels = 3);

}  // namespace acp::testing

#pragma once

#include <cstddef>
#include <span>

namespace otrepair {

enum class BandSide { upper, lower, inactive };

struct BandMultiplier {
  std::size_t column_index = 0;
  double value = 0.0;
  BandSide side = BandSide::inactive;
  int evaluations = 0;
};

// Finds nu with sum_i column_i v_i exp(-v_i nu) = target.
//
// F(nu) = sum_i column_i v_i exp(-v_i nu) - target is non-increasing, so the
// root is bracketed by doubling away from 0 (at most 200 doublings) and then
// refined with a Newton step safeguarded by bisection. The root is positive
// when column . v > target and negative when column . v < target. A root is
// guaranteed to exist when the column has positive mass on at least one
// entry with v_i > 0 and one with v_i < 0; otherwise this throws SolverError.
//
// The returned value satisfies |F(nu)| < 1e-10.
BandMultiplier solve_band_multiplier(std::span<const double> column, std::span<const double> v,
                                     double target, std::size_t column_index = 0);

}  // namespace otrepair

#pragma once

#include <span>

#include "otrepair/band_root.hpp"
#include "otrepair/constraints.hpp"
#include "otrepair/disparity.hpp"
#include "otrepair/matrix.hpp"

namespace otrepair {

// KL projections (prox operators) onto each constraint set. The by-value forms
// return the projection of `gamma_bar`; `project` works in place and is what
// the iterative solvers call.
//
// Ratios of the form target/current use 0/0 := 1, so zero rows or columns
// pass through unchanged.

Matrix prox_row_eq(Matrix gamma_bar, std::span<const double> p);
Matrix prox_col_eq(Matrix gamma_bar, std::span<const double> q);
Matrix prox_row_leq(Matrix gamma_bar, std::span<const double> p);
Matrix prox_col_leq(Matrix gamma_bar, std::span<const double> q);
Matrix prox_total_mass(Matrix gamma_bar, double eta);
Matrix prox_capacity(Matrix gamma_bar, const Matrix& cap);

// Column j is left alone when |[gamma_bar^T v]_j| <= theta_j + 1e-12; rows
// with v_i = 0 are never touched. Other entries become
// gamma_bar_ij exp(-v_i nu_j) with nu_j from solve_band_multiplier.
Matrix prox_parity_band(Matrix gamma_bar, std::span<const double> v,
                        std::span<const double> theta);
Matrix prox_parity_band(Matrix gamma_bar, const DisparityVector& v, const RepairBand& theta);

// Tolerance used to decide whether a band column is active.
inline constexpr double kBandActivationSlack = 1e-12;

void project(const ConstraintSet& set, Matrix& gamma);

// Constraint violation of gamma with respect to one set:
//   equalities:  L1 distance between achieved and required marginal / mass;
//   inequalities: L1 norm of the positive part of the excess;
//   parity band: sum_j max(0, |[gamma^T v]_j| - theta_j).
double violation(const ConstraintSet& set, const Matrix& gamma);

}  // namespace otrepair

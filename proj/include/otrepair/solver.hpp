#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "otrepair/constraints.hpp"
#include "otrepair/disparity.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/transport.hpp"

namespace otrepair {

inline constexpr int kDefaultAffineIters = 400;
inline constexpr int kDefaultRepairIters = 600;
inline constexpr double kDefaultResidualTol = 1e-9;
// Iterates are clamped at this value before dividing in the correction update.
inline constexpr double kCorrectionFloor = 1e-300;

// How the repair band is derived when a config is materialized against a
// target support. `none` drops the band from the cycle entirely.
struct ThetaSpec {
  enum class Kind { none, zero, uniform, vector };
  Kind kind = Kind::none;
  double value = 0.0;
  std::vector<double> values;

  std::optional<RepairBand> band(const SupportPtr& target) const;
  static ThetaSpec parse(const std::string& text);  // "zero", "none" or a number
};

struct SolveConfig {
  double epsilon = 0.01;
  int max_iters = kDefaultRepairIters;
  double residual_tol = kDefaultResidualTol;
  ThetaSpec theta;
  std::vector<ConstraintSet> cycle;

  void validate() const;
};

void to_json(nlohmann::json& j, const ThetaSpec& t);
void from_json(const nlohmann::json& j, ThetaSpec& t);
// The cycle is runtime data and is not serialized.
void to_json(nlohmann::json& j, const SolveConfig& c);
void from_json(const nlohmann::json& j, SolveConfig& c);

struct SolveReport {
  int iterations_run = 0;  // prox steps taken
  std::vector<double> final_residuals;
  // Largest residual after each completed pass over the cycle.
  std::vector<double> residual_history;
  double kl_to_kernel = 0.0;
  bool converged = false;
};

void to_json(nlohmann::json& j, const SolveReport& r);

struct SolveResult {
  Coupling coupling;
  SolveReport report;
};

// Multiplicative Dykstra over config.cycle, starting from xi. One iteration is
// one prox step; convergence is tested after every full pass over the cycle.
SolveResult dykstra(const Matrix& xi, const SolveConfig& config);

// Alternating row/column scaling with no correction factors.
SolveResult bregman_iterate(const Matrix& xi, const Histogram& p, const Histogram& q,
                            int max_iters = kDefaultAffineIters,
                            double tol = kDefaultResidualTol);

// Dykstra on [RowEq(p_x), ColEq(p_xt), ParityBand(v, theta)] from exp(-C/epsilon).
SolveResult solve_repair_coupling(const Histogram& p_x, const Histogram& p_xt,
                                  const DisparityVector& v, const RepairBand& theta,
                                  const CostMatrix& c, double epsilon,
                                  int max_iters = kDefaultRepairIters,
                                  double residual_tol = kDefaultResidualTol);

// Entropic coupling between the two group conditionals.
SolveResult solve_barycentre_coupling(const Histogram& p_s0, const Histogram& p_s1,
                                      const CostMatrix& c, double epsilon,
                                      int max_iters = kDefaultAffineIters,
                                      double residual_tol = kDefaultResidualTol);

// Splits gamma_b into the maps carrying each group onto the barycentre.
// Pair (i, k) sends gamma_b(i, k) from point i of group 0 and from point k of
// group 1 to the support point nearest pi0 * x_i + (1 - pi0) * x_k. Each
// coordinate of the combination is rounded to the nearest integer with ties
// going down when the support is integral; if the rounded tuple is not a
// support point the closest one in L1 distance is used (lowest index on ties).
// Mass from different pairs landing on the same point accumulates.
struct GroupMaps {
  Coupling to_barycentre_0;  // rows: group-0 source points
  Coupling to_barycentre_1;  // rows: group-1 source points
};
GroupMaps barycentre_group_maps(const Coupling& gamma_b, double pi0, const Support& support);

std::vector<double> residuals(const Matrix& gamma, const std::vector<ConstraintSet>& cycle);

}  // namespace otrepair

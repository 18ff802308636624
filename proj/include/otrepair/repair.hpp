#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "otrepair/disparity.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/support.hpp"

namespace otrepair {

struct WeightedSample {
  std::vector<double> features;  // adjusted features
  std::vector<double> neutral;   // carried through untouched
  double weight = 1.0;
  std::optional<int> group;
  std::optional<int> label;
  // Row of the original sample this one was split from.
  std::size_t origin = 0;
};

struct WeightedDataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> neutral_names;
  std::vector<WeightedSample> samples;

  double total_weight() const;
  bool empty() const { return samples.empty(); }
};

// Row-stochastic map w_ij = gamma_ij / P^X_i.
struct ProjectionMap {
  SupportPtr source;
  SupportPtr target;
  Matrix weights;
};

// Throws SolverError("coupling infeasible for this source histogram") when a
// row sum of gamma differs from p_x by more than 1e-8.
ProjectionMap projection_map(const Matrix& gamma, const Histogram& p_x, SupportPtr target);

// Row-normalizes a group-to-barycentre map. Rows without mass stay zero, so
// only samples of the group that produced the map can be sent through it.
ProjectionMap group_projection_map(const Matrix& gamma, SupportPtr source, SupportPtr target);

struct ApplyResult {
  WeightedDataset data;
  double dropped_weight = 0.0;
};

// Splits each sample at source point i into copies at every target point j
// with w_ij > min_weight, scaling its weight by w_ij. Output keeps input order
// and, within a sample, target order. Groups and labels are copied, never read.
ApplyResult apply_map(const WeightedDataset& data, const ProjectionMap& map,
                      double min_weight = 0.0);

// gamma^T (P^{X_s} / P^X): the distribution of the repaired features of group s.
Histogram pushforward_conditional(const Matrix& gamma, const Histogram& p_xs,
                                  const Histogram& p_x, SupportPtr target);

struct ThetaCheck {
  double tv_bound = 0.0;     // ||Theta||_1 / 2
  double achieved_tv = 0.0;  // ||gamma^T V||_1 / 2
  bool holds = false;
};

ThetaCheck theta_bound_check(const Matrix& gamma, const DisparityVector& v,
                             const RepairBand& theta);

}  // namespace otrepair

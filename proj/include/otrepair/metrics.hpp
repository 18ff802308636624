#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "json.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/repair.hpp"

namespace otrepair {

// Weighted histogram of the adjusted features over the observed points.
Histogram empirical_distribution(const WeightedDataset& data);
// Same, zero-filled onto a given support that must contain every sample.
Histogram empirical_distribution(const WeightedDataset& data, const SupportPtr& support);

// Per-group histograms on the union support of the whole dataset.
std::map<int, Histogram> groupwise_distributions(const WeightedDataset& data);

// TV distance between the two group-wise histograms. Requires exactly two groups.
double s_wise_tv(const WeightedDataset& data);

// Weighted positive rate of group 0 (unprivileged) over that of group 1.
double disparate_impact(std::span<const int> predictions, std::span<const double> weights,
                        std::span<const int> groups);

struct ConfusionCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
};

// Weighted confusion counts for groups 0 and 1.
struct GroupConfusion {
  std::array<ConfusionCounts, 2> group;

  static GroupConfusion tally(std::span<const int> predictions, std::span<const int> labels,
                              std::span<const double> weights, std::span<const int> groups);
};

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
  double weighted = 0.0;
  // Set when some group's f1 had a zero denominator and was taken as 0.
  bool zero_denominator = false;
};

// p_s holds the two group priors.
F1Scores f1_scores(const GroupConfusion& confusion, std::span<const double> p_s);

struct MetricReport {
  double f1_micro = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  double disparate_impact = 0.0;
  double s_wise_tv = 0.0;
  bool f1_warning = false;

  static std::string csv_header();
  std::string csv_row() const;
};

void to_json(nlohmann::json& j, const MetricReport& r);

}  // namespace otrepair

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "otrepair/classifier.hpp"
#include "otrepair/data_io.hpp"
#include "otrepair/disparity.hpp"
#include "otrepair/histogram.hpp"
#include "otrepair/metrics.hpp"
#include "otrepair/solver.hpp"

namespace otrepair {

// ---------------------------------------------------------------------------
// Synthetic Gaussian study

struct SyntheticConfig {
  std::uint64_t seed = 0;
  int samples = 10000;
  double p_s0 = 0.7;
  double mean0 = -10.0, std0 = 6.0;
  double mean1 = 1.0, std1 = 3.0;
  double target_mean = -5.0, target_std = 5.0;
  long support_lo = -30, support_hi = 10;
  double epsilon = 0.01;
  // Cost weight g in C_ij = g |i - j|. Zero means 1 / (hi - lo).
  double cost_weight = 0.0;
  int k_baseline = kDefaultAffineIters;
  int k_repair = kDefaultRepairIters;
  std::vector<double> theta_grid{1e-2, 1e-3, 0.0};
};

void to_json(nlohmann::json& j, const SyntheticConfig& c);
void from_json(const nlohmann::json& j, SyntheticConfig& c);

struct SyntheticArm {
  std::string name;
  std::optional<double> theta;  // unset for Origin and Baseline
  Histogram group0;             // projected group-conditional histograms
  Histogram group1;
  Histogram blind;              // projected group-blind histogram
  double s_wise_tv = 0.0;       // measured on the mapped dataset
  double tv_to_target = 0.0;
  std::optional<ThetaCheck> bound;
  SolveReport report;
  double seconds = 0.0;
};

struct SyntheticResult {
  Histogram p_x;
  Histogram p_s0;
  Histogram p_s1;
  Histogram target;
  std::vector<double> v;
  std::vector<SyntheticArm> arms;  // Origin, Baseline, then one per theta
};

// Floor-discretized normal on {lo..hi}; tail mass is folded onto the ends.
Histogram discretized_normal(const SupportPtr& grid, double mean, double std);

// Draws the mixture sample: group 0 with probability p_s0, floored, clamped.
WeightedDataset synthetic_samples(const SyntheticConfig& config);

SyntheticResult synthetic_experiment(const SyntheticConfig& config);

void write_synthetic_outputs(const std::filesystem::path& dir, const SyntheticResult& r);

// ---------------------------------------------------------------------------
// Adult census study

// Thresholds the weight-averaged score of one sample's splits. Weights must
// sum to 1 within 1e-6.
int repaired_prediction(std::span<const double> weights, std::span<const double> scores,
                        double f_th = 0.1);

TreeEnsemble train_stub_classifier(const WeightedDataset& train, std::uint64_t seed);

struct AdultConfig {
  std::filesystem::path data_dir = "data/adult";
  AdultAttribute attribute = AdultAttribute::race;
  int trials = 30;
  std::uint64_t seed = 0;
  double train_fraction = 0.6;
  double epsilon = 0.01;
  int k_affine = kDefaultAffineIters;
  int k_repair = kDefaultRepairIters;
  double f_th = 0.1;
  double selection_threshold = 0.08;
  // Splits with map weight at or below this are dropped and the survivors of
  // each sample renormalized before scoring.
  double min_weight = 1e-7;
  std::optional<std::filesystem::path> scores;  // external ScoreTable
};

struct TrialResult {
  std::string arm;
  MetricReport metrics;
  double seconds = 0.0;
};

struct ArmSummary {
  std::string arm;
  MetricReport mean;
  MetricReport stddev;
  double mean_seconds = 0.0;
};

struct AdultResult {
  FeatureSelection selection;
  std::size_t rows = 0;
  std::vector<std::vector<TrialResult>> trials;  // [trial][arm]
  std::vector<ArmSummary> summary;
};

inline const std::vector<std::string>& adult_arm_names() {
  static const std::vector<std::string> names{"Origin", "Baseline", "Barycentre", "1e-2-repair",
                                              "1e-3-repair"};
  return names;
}

AdultResult adult_experiment(const AdultConfig& config);

void write_adult_outputs(const std::filesystem::path& dir, const AdultResult& r);

}  // namespace otrepair

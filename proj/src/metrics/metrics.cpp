#include "otrepair/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "otrepair/divergence.hpp"
#include "otrepair/errors.hpp"

namespace otrepair {
namespace {

SupportPtr observed_support(const WeightedDataset& data) {
  if (data.empty()) throw ValidationError("empty dataset");
  const std::size_t d = data.samples.front().features.size();
  std::vector<double> coords;
  coords.reserve(data.samples.size() * d);
  for (const auto& s : data.samples) {
    if (s.features.size() != d) throw ValidationError("inconsistent feature dimension");
    coords.insert(coords.end(), s.features.begin(), s.features.end());
  }
  return make_support(Support::canonical(d, std::move(coords)));
}

std::vector<double> accumulate_weights(const WeightedDataset& data, const Support& support,
                                       std::optional<int> only_group) {
  std::vector<double> w(support.size(), 0.0);
  for (std::size_t r = 0; r < data.samples.size(); ++r) {
    const auto& s = data.samples[r];
    if (only_group && s.group != only_group) continue;
    const auto i = support.find(s.features);
    if (!i) {
      throw ValidationError("sample at row " + std::to_string(r) + " is not on the support");
    }
    w[*i] += s.weight;
  }
  return w;
}

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw ValidationError("metric inputs have different lengths");
}

}  // namespace

Histogram empirical_distribution(const WeightedDataset& data) {
  return empirical_distribution(data, observed_support(data));
}

Histogram empirical_distribution(const WeightedDataset& data, const SupportPtr& support) {
  if (data.empty()) throw ValidationError("empty dataset");
  return make_histogram(support, accumulate_weights(data, *support, std::nullopt));
}

std::map<int, Histogram> groupwise_distributions(const WeightedDataset& data) {
  const SupportPtr support = observed_support(data);
  std::map<int, double> seen;
  for (const auto& s : data.samples) {
    if (!s.group) throw ValidationError("groupwise_distributions: sample without a group");
    seen[*s.group] += s.weight;
  }
  std::map<int, Histogram> out;
  for (const auto& [g, total] : seen) {
    if (!(total > 0.0)) {
      throw ValidationError("group " + std::to_string(g) + " has zero total weight");
    }
    out.emplace(g, make_histogram(support, accumulate_weights(data, *support, g)));
  }
  return out;
}

double s_wise_tv(const WeightedDataset& data) {
  const auto groups = groupwise_distributions(data);
  if (groups.size() != 2) {
    throw ValidationError("s_wise_tv needs exactly two groups, found " +
                          std::to_string(groups.size()));
  }
  return tv_distance(groups.begin()->second, std::next(groups.begin())->second);
}

double disparate_impact(std::span<const int> predictions, std::span<const double> weights,
                        std::span<const int> groups) {
  check_lengths(predictions.size(), weights.size(), groups.size());
  double pos[2] = {0.0, 0.0};
  double tot[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int g = groups[i];
    if (g != 0 && g != 1) throw ValidationError("disparate_impact: groups must be 0 or 1");
    tot[g] += weights[i];
    if (predictions[i] == 1) pos[g] += weights[i];
  }
  if (!(tot[0] > 0.0) || !(tot[1] > 0.0)) {
    throw ValidationError("disparate_impact: both groups need positive weight");
  }
  const double r1 = pos[1] / tot[1];
  if (!(r1 > 0.0)) throw ValidationError("privileged positive rate is zero");
  return (pos[0] / tot[0]) / r1;
}

GroupConfusion GroupConfusion::tally(std::span<const int> predictions,
                                     std::span<const int> labels,
                                     std::span<const double> weights,
                                     std::span<const int> groups) {
  check_lengths(predictions.size(), labels.size(), weights.size());
  check_lengths(predictions.size(), groups.size(), weights.size());
  GroupConfusion c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int g = groups[i];
    if (g != 0 && g != 1) throw ValidationError("confusion: groups must be 0 or 1");
    ConfusionCounts& k = c.group[static_cast<std::size_t>(g)];
    const double w = weights[i];
    const bool p = predictions[i] == 1;
    const bool y = labels[i] == 1;
    if (p && y) k.tp += w;
    else if (p) k.fp += w;
    else if (y) k.fn += w;
    else k.tn += w;
  }
  return c;
}

F1Scores f1_scores(const GroupConfusion& confusion, std::span<const double> p_s) {
  if (p_s.size() != 2) throw ValidationError("f1_scores: expected two group priors");
  F1Scores f;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    const ConfusionCounts& k = confusion.group[s];
    const double n = 2.0 * k.tp;
    const double d = 2.0 * k.tp + k.fp + k.fn;
    num += n;
    den += d;
    double f1 = 0.0;
    if (d > 0.0) {
      f1 = n / d;
    } else {
      f.zero_denominator = true;
    }
    f.macro += 0.5 * f1;
    f.weighted += p_s[s] * f1;
  }
  if (den > 0.0) {
    f.micro = num / den;
  } else {
    f.zero_denominator = true;
  }
  return f;
}

std::string MetricReport::csv_header() {
  return "f1_micro,f1_macro,f1_weighted,disparate_impact,s_wise_tv";
}

std::string MetricReport::csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g", f1_micro, f1_macro,
                f1_weighted, disparate_impact, s_wise_tv);
  return buf;
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = {{"f1_micro", r.f1_micro},
       {"f1_macro", r.f1_macro},
       {"f1_weighted", r.f1_weighted},
       {"disparate_impact", r.disparate_impact},
       {"s_wise_tv", r.s_wise_tv},
       {"f1_warning", r.f1_warning}};
}

}  // namespace otrepair

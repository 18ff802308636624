#include "otrepair/repair.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otrepair/errors.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {

double WeightedDataset::total_weight() const {
  double s = 0.0;
  for (const auto& x : samples) s += x.weight;
  return s;
}

ProjectionMap projection_map(const Matrix& gamma, const Histogram& p_x, SupportPtr target) {
  if (!target) throw ValidationError("projection_map: null target support");
  if (gamma.rows() != p_x.size() || gamma.cols() != target->size()) {
    throw ValidationError("projection_map: coupling shape does not match the supports");
  }
  const std::vector<double> rows = gamma.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i] - p_x[i]) > 1e-8) {
      throw SolverError("coupling infeasible for this source histogram (row " +
                        std::to_string(i) + ": " + std::to_string(rows[i]) + " vs " +
                        std::to_string(p_x[i]) + ")");
    }
    if (!(p_x[i] > 0.0)) {
      throw ValidationError("projection_map: P^X must be strictly positive");
    }
  }
  ProjectionMap map{p_x.support_ptr(), std::move(target), gamma};
  // Normalizing by the achieved row sum keeps rows stochastic to rounding.
  std::vector<double> f(rows.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 / rows[i];
  simd::active().scale_rows(map.weights.data(), map.weights.rows(), map.weights.cols(),
                            f.data());
  return map;
}

ProjectionMap group_projection_map(const Matrix& gamma, SupportPtr source, SupportPtr target) {
  if (!source || !target || gamma.rows() != source->size() || gamma.cols() != target->size()) {
    throw ValidationError("group_projection_map: coupling shape does not match the supports");
  }
  ProjectionMap map{std::move(source), std::move(target), gamma};
  std::vector<double> f = gamma.row_sums();
  for (double& x : f) x = x > 0.0 ? 1.0 / x : 0.0;
  simd::active().scale_rows(map.weights.data(), map.weights.rows(), map.weights.cols(),
                            f.data());
  return map;
}

ApplyResult apply_map(const WeightedDataset& data, const ProjectionMap& map,
                      double min_weight) {
  if (!(min_weight >= 0.0)) throw ValidationError("min_weight must be nonnegative");
  ApplyResult out;
  out.data.feature_names = data.feature_names;
  out.data.neutral_names = data.neutral_names;
  out.data.samples.reserve(data.samples.size());
  const Support& src = *map.source;
  const Support& tgt = *map.target;
  for (std::size_t r = 0; r < data.samples.size(); ++r) {
    const WeightedSample& s = data.samples[r];
    const auto i = src.find(s.features);
    if (!i) {
      throw ValidationError("apply_map: sample at row " + std::to_string(r) +
                            " is not on the source support");
    }
    const auto w = map.weights.row(*i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] > min_weight) {
        WeightedSample copy;
        const auto p = tgt.point(j);
        copy.features.assign(p.begin(), p.end());
        copy.neutral = s.neutral;
        copy.weight = s.weight * w[j];
        copy.group = s.group;
        copy.label = s.label;
        copy.origin = s.origin;
        out.data.samples.push_back(std::move(copy));
      } else {
        out.dropped_weight += s.weight * w[j];
      }
    }
  }
  if (out.data.samples.empty() && !data.samples.empty()) {
    throw ValidationError("all mass dropped: lower min_weight");
  }
  return out;
}

Histogram pushforward_conditional(const Matrix& gamma, const Histogram& p_xs,
                                  const Histogram& p_x, SupportPtr target) {
  if (!target || gamma.cols() != target->size() || gamma.rows() != p_x.size()) {
    throw ValidationError("pushforward_conditional: shape mismatch");
  }
  const Histogram cond = p_xs.embed(p_x.support_ptr());
  std::vector<double> ratio(p_x.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (!(p_x[i] > 0.0)) {
      throw ValidationError("pushforward_conditional: P^X has a zero entry; prune support first");
    }
    ratio[i] = cond[i] / p_x[i];
  }
  std::vector<double> mass(gamma.cols());
  simd::active().col_weighted_sums(gamma.data(), gamma.rows(), gamma.cols(), ratio.data(),
                                   mass.data());
  double total = 0.0;
  for (double& m : mass) {
    m = std::max(m, 0.0);
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw SolverError("coupling infeasible for this source histogram (pushforward mass " +
                      std::to_string(total) + ")");
  }
  return make_histogram(std::move(target), mass);
}

ThetaCheck theta_bound_check(const Matrix& gamma, const DisparityVector& v,
                             const RepairBand& theta) {
  if (gamma.rows() != v.size() || gamma.cols() != theta.size()) {
    throw ValidationError("theta_bound_check: shape mismatch");
  }
  std::vector<double> s(gamma.cols());
  simd::active().col_weighted_sums(gamma.data(), gamma.rows(), gamma.cols(), v.values().data(),
                                   s.data());
  ThetaCheck c;
  for (double x : s) c.achieved_tv += std::abs(x);
  c.achieved_tv *= 0.5;
  c.tv_bound = theta.tv_bound();
  c.holds = c.achieved_tv <= c.tv_bound + 1e-9;
  return c;
}

}  // namespace otrepair

#include "otrepair/disparity.hpp"

#include <cmath>
#include <numeric>

#include "otrepair/errors.hpp"

namespace otrepair {

DisparityVector::DisparityVector(SupportPtr support, std::vector<double> values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (!support_ || values_.size() != support_->size()) {
    throw ValidationError("disparity vector: length does not match support");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("disparity vector: non-finite entry");
  }
}

bool DisparityVector::is_zero() const {
  for (double v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

RepairBand::RepairBand(SupportPtr target, std::vector<double> values)
    : support_(std::move(target)), values_(std::move(values)) {
  if (support_ && values_.size() != support_->size()) {
    throw ValidationError("repair band: length does not match target support");
  }
  for (double t : values_) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw ValidationError("repair band: entries must be finite and nonnegative");
    }
  }
}

RepairBand RepairBand::uniform(SupportPtr target, double value) {
  if (!target) throw ValidationError("repair band: null support");
  const std::size_t n = target->size();
  return RepairBand(std::move(target), std::vector<double>(n, value));
}

double RepairBand::tv_bound() const {
  return 0.5 * std::accumulate(values_.begin(), values_.end(), 0.0);
}

DisparityVector disparity_vector(const Histogram& p_s0, const Histogram& p_s1,
                                 const Histogram& p_x) {
  const SupportPtr& s = p_x.support_ptr();
  const Histogram h0 = p_s0.embed(s);
  const Histogram h1 = p_s1.embed(s);
  std::vector<double> v(s->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(p_x[i] > 0.0)) {
      throw ValidationError("disparity_vector: P^X has a zero entry at index " +
                            std::to_string(i) + "; prune support first");
    }
    v[i] = (h0[i] - h1[i]) / p_x[i];
  }
  return DisparityVector(s, std::move(v));
}

PrunedInputs prune_zero_mass(const Histogram& p_x, std::span<const Histogram> conditionals) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < p_x.size(); ++i) {
    if (p_x[i] > 0.0) kept.push_back(i);
  }
  if (kept.empty()) throw ValidationError("empty distribution");
  auto sub = make_support(p_x.support().subset(kept));
  auto restrict_to = [&](const Histogram& h, double& dropped) {
    const Histogram e = h.embed(p_x.support_ptr());
    std::vector<double> w;
    w.reserve(kept.size());
    for (std::size_t i : kept) w.push_back(e[i]);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    dropped = 1.0 - total;
    return make_histogram(sub, w);
  };
  double unused = 0.0;
  PrunedInputs out{restrict_to(p_x, unused), {}, kept, {}};
  for (const Histogram& h : conditionals) {
    double dropped = 0.0;
    out.conditionals.push_back(restrict_to(h, dropped));
    out.dropped_mass.push_back(dropped);
  }
  return out;
}

}  // namespace otrepair

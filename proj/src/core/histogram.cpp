#include "otrepair/histogram.hpp"

#include <cmath>

#include "otrepair/errors.hpp"

namespace otrepair {

Histogram::Histogram(SupportPtr support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (!support_) throw ValidationError("histogram: null support");
  if (mass_.size() != support_->size()) {
    throw ValidationError("histogram: mass length " + std::to_string(mass_.size()) +
                          " does not match support size " + std::to_string(support_->size()));
  }
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ValidationError("histogram: entries must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("histogram: mass sums to " + std::to_string(total) + ", not 1");
  }
}

Histogram Histogram::embed(const SupportPtr& larger) const {
  if (larger == support_ || *larger == *support_) return Histogram(larger, mass_);
  if (larger->dim() != support_->dim()) {
    throw ValidationError("histogram: cannot embed into a support of another dimension");
  }
  std::vector<double> m(larger->size(), 0.0);
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const auto idx = larger->find(support_->point(i));
    if (!idx) {
      if (mass_[i] > 0.0) {
        throw ValidationError("histogram: point with positive mass missing from target support");
      }
      continue;
    }
    m[*idx] = mass_[i];
  }
  return Histogram(larger, std::move(m));
}

bool Histogram::strictly_positive() const {
  for (double m : mass_) {
    if (!(m > 0.0)) return false;
  }
  return true;
}

Histogram make_histogram(SupportPtr support, std::span<const double> raw_weights) {
  if (!support) throw ValidationError("histogram: null support");
  if (raw_weights.size() != support->size()) {
    throw ValidationError("histogram: weight length does not match support size");
  }
  double total = 0.0;
  for (double w : raw_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("histogram: negative or non-finite weight");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("empty distribution");
  std::vector<double> m(raw_weights.begin(), raw_weights.end());
  for (double& x : m) x /= total;
  return Histogram(std::move(support), std::move(m));
}

bool same_support(const Histogram& a, const Histogram& b) {
  return a.support_ptr() == b.support_ptr() || a.support() == b.support();
}

}  // namespace otrepair

#pragma once

#include <span>
#include <vector>

#include "otrepair/support.hpp"

namespace otrepair {

// Probability vector over a Support: nonnegative, summing to one.
class Histogram {
 public:
  // Validates nonnegativity and unit mass (within 1e-12).
  Histogram(SupportPtr support, std::vector<double> mass);

  const Support& support() const { return *support_; }
  const SupportPtr& support_ptr() const { return support_; }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }

  // Re-express on a superset support, zero-filling points this histogram
  // does not cover.
  Histogram embed(const SupportPtr& larger) const;

  bool strictly_positive() const;

 private:
  SupportPtr support_;
  std::vector<double> mass_;
};

// Normalizes nonnegative raw weights into a histogram.
Histogram make_histogram(SupportPtr support, std::span<const double> raw_weights);

bool same_support(const Histogram& a, const Histogram& b);

}  // namespace otrepair

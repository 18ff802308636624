#pragma once

#include <span>
#include <vector>

#include "otrepair/histogram.hpp"

namespace otrepair {

// V = (P^{X_s0} - P^{X_s1}) / P^X on the source support. The only
// group-level input the repair coupling needs.
class DisparityVector {
 public:
  // Accepts externally supplied values; checks length and finiteness.
  DisparityVector(SupportPtr support, std::vector<double> values);

  const Support& support() const { return *support_; }
  const SupportPtr& support_ptr() const { return support_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_zero() const;

 private:
  SupportPtr support_;
  std::vector<double> values_;
};

// Per-target-point tolerance Theta on |[gamma^T V]_j|. Theta = 0 is total repair.
class RepairBand {
 public:
  RepairBand(SupportPtr target, std::vector<double> values);
  static RepairBand uniform(SupportPtr target, double value);
  static RepairBand zero(SupportPtr target) { return uniform(std::move(target), 0.0); }

  const SupportPtr& support_ptr() const { return support_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  // Upper bound on the group-wise TV distance after repair: ||Theta||_1 / 2.
  double tv_bound() const;

 private:
  SupportPtr support_;
  std::vector<double> values_;
};

// Conditionals are zero-filled onto p_x's support when they live on a subset.
// Throws ValidationError("... prune support first") if p_x has a zero entry.
DisparityVector disparity_vector(const Histogram& p_s0, const Histogram& p_s1,
                                 const Histogram& p_x);

// Drops support points where p_x has zero mass and restricts the given
// conditionals accordingly (renormalizing them; any mass they carried on the
// dropped points is reported through `dropped_mass`).
struct PrunedInputs {
  Histogram p_x;
  std::vector<Histogram> conditionals;
  std::vector<std::size_t> kept;  // indices into the original support
  std::vector<double> dropped_mass;
};
PrunedInputs prune_zero_mass(const Histogram& p_x, std::span<const Histogram> conditionals);

}  // namespace otrepair

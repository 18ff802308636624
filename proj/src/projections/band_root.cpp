#include "otrepair/band_root.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "otrepair/errors.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {
namespace {

constexpr int kMaxDoublings = 200;
constexpr int kMaxRefine = 400;
constexpr double kResidualTol = 1e-13;

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Column entries with positive mass and v != 0, split by the sign of v so the
// sign of F can be decided in log space when exp(-v x) would overflow.
class BandFunction {
 public:
  BandFunction(std::span<const double> column, std::span<const double> v, double target)
      : target_(target) {
    for (std::size_t i = 0; i < column.size(); ++i) {
      if (column[i] > 0.0 && v[i] != 0.0) {
        c_.push_back(column[i]);
        v_.push_back(v[i]);
      }
    }
  }

  bool has_positive() const {
    return std::any_of(v_.begin(), v_.end(), [](double x) { return x > 0.0; });
  }
  bool has_negative() const {
    return std::any_of(v_.begin(), v_.end(), [](double x) { return x < 0.0; });
  }

  // F(x) and F'(x); not finite when some exponent overflows.
  simd::Moments eval(double x) const {
    simd::Moments m = simd::active().exp_moments(c_.data(), v_.data(), c_.size(), x);
    m.value -= target_;
    m.slope = -m.slope;
    return m;
  }

  // Sign of F(x), robust to overflow.
  int sign(double x) const {
    const simd::Moments m = eval(x);
    if (std::isfinite(m.value) && std::abs(m.value) > 1e-300) return m.value > 0.0 ? 1 : -1;
    double lp = -std::numeric_limits<double>::infinity();
    double ln = lp;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const double t = std::log(c_[i] * std::abs(v_[i])) - v_[i] * x;
      if (v_[i] > 0.0) {
        lp = log_add(lp, t);
      } else {
        ln = log_add(ln, t);
      }
    }
    if (target_ > 0.0) ln = log_add(ln, std::log(target_));
    if (target_ < 0.0) lp = log_add(lp, std::log(-target_));
    if (lp == ln) return 0;
    return lp > ln ? 1 : -1;
  }

  std::size_t size() const { return c_.size(); }

 private:
  std::vector<double> c_;
  std::vector<double> v_;
  double target_;
};

}  // namespace

BandMultiplier solve_band_multiplier(std::span<const double> column, std::span<const double> v,
                                     double target, std::size_t column_index) {
  if (column.size() != v.size()) {
    throw ValidationError("solve_band_multiplier: column and v lengths differ");
  }
  BandFunction f(column, v, target);
  BandMultiplier out;
  out.column_index = column_index;

  const simd::Moments at0 = f.eval(0.0);
  out.evaluations = 1;
  if (at0.value == 0.0) return out;
  const double dir = at0.value > 0.0 ? 1.0 : -1.0;
  out.side = dir > 0.0 ? BandSide::upper : BandSide::lower;

  // For a positive root F must eventually turn negative, which needs an
  // entry with v < 0 (and symmetrically for a negative root).
  const bool reachable = dir > 0.0 ? f.has_negative() : f.has_positive();

  double lo = 0.0;  // F(lo) has sign dir
  double hi = 0.0;  // F(hi) has sign -dir (or is zero)
  bool bracketed = false;
  if (reachable) {
    double step = 1.0;
    for (int k = 0; k < kMaxDoublings; ++k) {
      const double x = dir * step;
      const int s = f.sign(x);
      ++out.evaluations;
      if (s == 0) {
        out.value = x;
        return out;
      }
      if (s != static_cast<int>(dir)) {
        hi = x;
        bracketed = true;
        break;
      }
      lo = x;
      step *= 2.0;
    }
  }
  if (!bracketed) {
    throw SolverError("root not bracketed for band column " + std::to_string(column_index) +
                      ": the column needs positive mass where v > 0 and where v < 0");
  }

  // Work on an increasing interval [a, b] with F(a) > 0 > F(b).
  double a = std::min(lo, hi);
  double b = std::max(lo, hi);
  double x = 0.5 * (a + b);
  double last_step = b - a;
  for (int it = 0; it < kMaxRefine; ++it) {
    const simd::Moments m = f.eval(x);
    ++out.evaluations;
    const bool finite = std::isfinite(m.value) && std::isfinite(m.slope);
    if (finite) {
      if (std::abs(m.value) <= kResidualTol * std::max(1.0, std::abs(target))) break;
      if (m.value > 0.0) {
        a = x;
      } else {
        b = x;
      }
    } else {
      if (f.sign(x) > 0) {
        a = x;
      } else {
        b = x;
      }
    }
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) {
      x = mid;
      break;
    }
    // Newton unless it leaves the bracket or fails to halve the step.
    double next = mid;
    if (finite && m.slope < 0.0) {
      const double newton = x - m.value / m.slope;
      if (newton > a && newton < b && std::abs(newton - x) < 0.5 * last_step) next = newton;
    }
    last_step = std::abs(next - x);
    x = next;
  }
  out.value = x;
  return out;
}

}  // namespace otrepair

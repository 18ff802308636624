#include "otrepair/divergence.hpp"

#include <cmath>

#include "otrepair/errors.hpp"

namespace otrepair {

double entropy(const Matrix& gamma) {
  double e = 0.0;
  for (double g : gamma.values()) {
    if (g > 0.0) e -= g * (std::log(g) - 1.0);
  }
  return e;
}

double kl_divergence(const Matrix& gamma, const Matrix& xi) {
  if (!gamma.same_shape(xi)) throw ValidationError("kl_divergence: shape mismatch");
  double kl = 0.0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double x = xi.data()[k];
    if (!(x > 0.0)) throw ValidationError("kl_divergence: reference entries must be positive");
    const double g = gamma.data()[k];
    if (g > 0.0) kl += g * (std::log(g / x) - 1.0);
  }
  return kl;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("tv_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv_distance(const Histogram& p, const Histogram& q) {
  if (!same_support(p, q)) throw ValidationError("tv_distance: support mismatch");
  return tv_distance(p.mass(), q.mass());
}

}  // namespace otrepair

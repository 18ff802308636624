#include "otrepair/transport.hpp"

#include <cmath>

#include "otrepair/errors.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {

CostMatrix cost_matrix(const Support& source, const Support& target,
                       std::span<const double> weights) {
  const std::size_t d = source.dim();
  if (target.dim() != d || weights.size() != d) {
    throw ValidationError("cost_matrix: dimension mismatch between supports and weights");
  }
  for (double g : weights) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw ValidationError("cost_matrix: weights must be positive");
    }
  }
  CostMatrix c{Matrix(source.size(), target.size()), {weights.begin(), weights.end()}};
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto a = source.point(i);
    auto row = c.values.row(i);
    for (std::size_t j = 0; j < target.size(); ++j) {
      const auto b = target.point(j);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += weights[k] * std::abs(a[k] - b[k]);
      row[j] = s;
    }
  }
  return c;
}

Matrix gibbs_kernel(const CostMatrix& cost, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("gibbs_kernel: epsilon must be positive");
  }
  Matrix xi(cost.values.rows(), cost.values.cols());
  simd::active().gibbs(cost.values.data(), 1.0 / epsilon, xi.data(), xi.size());
  for (double x : xi.values()) {
    if (!(x > 0.0)) throw ValidationError("epsilon too small for cost range");
  }
  return xi;
}

Matrix product_coupling(const Histogram& p, const Histogram& q) {
  Matrix g(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto row = g.row(i);
    for (std::size_t j = 0; j < q.size(); ++j) row[j] = p[i] * q[j];
  }
  return g;
}

}  // namespace otrepair

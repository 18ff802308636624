#pragma once

#include <span>
#include <vector>

#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/support.hpp"

namespace otrepair {

// C_ij = sum_k g_k |source_i,k - target_j,k|.
struct CostMatrix {
  Matrix values;
  std::vector<double> weights;
};

CostMatrix cost_matrix(const Support& source, const Support& target,
                       std::span<const double> weights);

// xi = exp(-C / epsilon). Throws if epsilon <= 0 or any entry underflows to 0.
Matrix gibbs_kernel(const CostMatrix& cost, double epsilon);

// Outer product P (x) Q.
Matrix product_coupling(const Histogram& p, const Histogram& q);

}  // namespace otrepair

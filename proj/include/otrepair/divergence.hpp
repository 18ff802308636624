#pragma once

#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"

namespace otrepair {

// E(gamma) = -sum gamma_ij (log gamma_ij - 1), with 0 log 0 = 0.
double entropy(const Matrix& gamma);

// KL(gamma | xi) = sum gamma_ij (log(gamma_ij / xi_ij) - 1), with 0 log 0 = 0.
// The "-1" term makes this negative for sub-probability matrices; it is the
// objective minimized by every prox and solver in the library. Requires xi > 0.
double kl_divergence(const Matrix& gamma, const Matrix& xi);

// Half the L1 distance between histograms on the same support.
double tv_distance(const Histogram& p, const Histogram& q);
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace otrepair

#include "otrepair/simd/kernels.hpp"

#include <cmath>

namespace otrepair::simd {
namespace {

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = sum(m + i * cols, cols);
}

void col_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += row[j];
  }
}

void col_weighted_sums(const double* m, std::size_t rows, std::size_t cols,
                       const double* w, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    const double* row = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += wi * row[j];
  }
}

void scale_rows(double* m, std::size_t rows, std::size_t cols, const double* f) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    const double fi = f[i];
    for (std::size_t j = 0; j < cols; ++j) row[j] *= fi;
  }
}

void scale_cols(double* m, std::size_t rows, std::size_t cols, const double* f) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] *= f[j];
  }
}

void multiply(double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void minimum(double* a, const double* cap, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] = a[i] < cap[i] ? a[i] : cap[i];
}

void guarded_ratio(double* q, const double* g, std::size_t n, double floor) {
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] == 0.0 && g[i] == 0.0) {
      q[i] = 1.0;
    } else {
      q[i] = q[i] / (g[i] > floor ? g[i] : floor);
    }
  }
}

void gibbs(const double* cost, double inv_eps, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-cost[i] * inv_eps);
}

void scale_by_exp(double* a, const double* x, double coeff, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) a[j] *= std::exp(coeff * x[j]);
}

Moments exp_moments(const double* c, const double* v, std::size_t n, double x) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = c[i] * v[i] * std::exp(-v[i] * x);
    m.value += t;
    m.slope += t * v[i];
  }
  return m;
}

void exp_array(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",    sum,      row_sums, col_sums,      col_weighted_sums,
      scale_rows,  scale_cols, multiply, minimum,     guarded_ratio,
      gibbs,       scale_by_exp, exp_moments, exp_array,
  };
  return table;
}

}  // namespace otrepair::simd

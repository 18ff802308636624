#pragma once
// Dense data-parallel kernels used by the transport solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at runtime from CPUID;
// setting OTREPAIR_SIMD=scalar in the environment forces the reference path.
// Matrices are row-major with `rows * cols` contiguous doubles.

#include <cstddef>
#include <string_view>

namespace otrepair::simd {

struct Moments {
  double value = 0.0;  // sum_i c_i v_i exp(-v_i x)
  double slope = 0.0;  // sum_i c_i v_i^2 exp(-v_i x)
};

struct KernelTable {
  std::string_view name;

  double (*sum)(const double* a, std::size_t n);
  void (*row_sums)(const double* m, std::size_t rows, std::size_t cols, double* out);
  void (*col_sums)(const double* m, std::size_t rows, std::size_t cols, double* out);
  // out_j = sum_i w_i m_ij
  void (*col_weighted_sums)(const double* m, std::size_t rows, std::size_t cols,
                            const double* w, double* out);
  void (*scale_rows)(double* m, std::size_t rows, std::size_t cols, const double* f);
  void (*scale_cols)(double* m, std::size_t rows, std::size_t cols, const double* f);
  void (*multiply)(double* a, const double* b, std::size_t n);
  void (*minimum)(double* a, const double* cap, std::size_t n);
  // q <- q / max(g, floor), with 0/0 := 1. On entry q holds the pre-projection point.
  void (*guarded_ratio)(double* q, const double* g, std::size_t n, double floor);
  // out_i = exp(-cost_i * inv_eps)
  void (*gibbs)(const double* cost, double inv_eps, double* out, std::size_t n);
  // a_j *= exp(coeff * x_j)
  void (*scale_by_exp)(double* a, const double* x, double coeff, std::size_t n);
  Moments (*exp_moments)(const double* c, const double* v, std::size_t n, double x);
  // out_i = exp(x_i); exposed for equivalence testing.
  void (*exp)(const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the host CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// The table used by the library.
const KernelTable& active();

}  // namespace otrepair::simd

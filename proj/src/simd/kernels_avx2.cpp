// AVX2/FMA variants of the dense kernels. This translation unit is compiled
// with -mavx2 -mfma and must only be entered after a CPUID check.
#include "otrepair/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace otrepair::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// 2^k for integral k in [-1022, 1023] held in a double lane.
inline __m256d pow2i(__m256d k) {
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  __m256i bits = _mm256_castpd_si256(_mm256_add_pd(k, magic));
  bits = _mm256_sub_epi64(bits, _mm256_castpd_si256(magic));
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

// exp with Cody-Waite reduction and a degree-13 Taylor polynomial on
// |r| <= ln2/2. exp(0) is exactly 1; results below the subnormal range are 0.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-745.1332191019412);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Split the exponent so each factor stays normal down to 2^-1075.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  __m256d y = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(n1)), pow2i(n2));

  y = _mm256_blendv_pd(y, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                       _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  y = _mm256_blendv_pd(y, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  y = _mm256_blendv_pd(y, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return y;
}

double sum(const double* a, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
    s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a + i + kLanes));
  }
  for (; i + kLanes <= n; i += kLanes) s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i];
  return s;
}

void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = sum(m + i * cols, cols);
}

void col_weighted_sums(const double* m, std::size_t rows, std::size_t cols,
                       const double* w, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    const double* row = m + i * cols;
    const __m256d wv = _mm256_set1_pd(wi);
    std::size_t j = 0;
    for (; j + kLanes <= cols; j += kLanes) {
      _mm256_storeu_pd(out + j, _mm256_fmadd_pd(wv, _mm256_loadu_pd(row + j),
                                                _mm256_loadu_pd(out + j)));
    }
    for (; j < cols; ++j) out[j] += wi * row[j];
  }
}

void col_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    std::size_t j = 0;
    for (; j + kLanes <= cols; j += kLanes) {
      _mm256_storeu_pd(out + j,
                       _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(row + j)));
    }
    for (; j < cols; ++j) out[j] += row[j];
  }
}

void scale_rows(double* m, std::size_t rows, std::size_t cols, const double* f) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    const __m256d fv = _mm256_set1_pd(f[i]);
    std::size_t j = 0;
    for (; j + kLanes <= cols; j += kLanes) {
      _mm256_storeu_pd(row + j, _mm256_mul_pd(_mm256_loadu_pd(row + j), fv));
    }
    for (; j < cols; ++j) row[j] *= f[i];
  }
}

void scale_cols(double* m, std::size_t rows, std::size_t cols, const double* f) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    std::size_t j = 0;
    for (; j + kLanes <= cols; j += kLanes) {
      _mm256_storeu_pd(row + j,
                       _mm256_mul_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(f + j)));
    }
    for (; j < cols; ++j) row[j] *= f[j];
  }
}

void multiply(double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void minimum(double* a, const double* cap, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d av = _mm256_loadu_pd(a + i);
    const __m256d cv = _mm256_loadu_pd(cap + i);
    // Keep `a` on ties and on a < cap, matching the scalar select.
    _mm256_storeu_pd(a + i, _mm256_blendv_pd(cv, av, _mm256_cmp_pd(av, cv, _CMP_LT_OQ)));
  }
  for (; i < n; ++i) a[i] = a[i] < cap[i] ? a[i] : cap[i];
}

void guarded_ratio(double* q, const double* g, std::size_t n, double floor) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d fl = _mm256_set1_pd(floor);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d qv = _mm256_loadu_pd(q + i);
    const __m256d gv = _mm256_loadu_pd(g + i);
    const __m256d both_zero = _mm256_and_pd(_mm256_cmp_pd(qv, zero, _CMP_EQ_OQ),
                                            _mm256_cmp_pd(gv, zero, _CMP_EQ_OQ));
    const __m256d denom =
        _mm256_blendv_pd(fl, gv, _mm256_cmp_pd(gv, fl, _CMP_GT_OQ));
    _mm256_storeu_pd(q + i, _mm256_blendv_pd(_mm256_div_pd(qv, denom), one, both_zero));
  }
  for (; i < n; ++i) {
    if (q[i] == 0.0 && g[i] == 0.0) {
      q[i] = 1.0;
    } else {
      q[i] = q[i] / (g[i] > floor ? g[i] : floor);
    }
  }
}

// Tails are padded into a full register so every element goes through the
// same vector exp regardless of position.
void gibbs(const double* cost, double inv_eps, double* out, std::size_t n) {
  const __m256d s = _mm256_set1_pd(-inv_eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, exp_pd(_mm256_mul_pd(_mm256_loadu_pd(cost + i), s)));
  }
  if (i < n) {
    alignas(32) double buf[kLanes] = {0, 0, 0, 0};
    for (std::size_t k = 0; i + k < n; ++k) buf[k] = cost[i + k];
    _mm256_store_pd(buf, exp_pd(_mm256_mul_pd(_mm256_load_pd(buf), s)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = buf[k];
  }
}

void scale_by_exp(double* a, const double* x, double coeff, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(coeff);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d e = exp_pd(_mm256_mul_pd(cv, _mm256_loadu_pd(x + j)));
    _mm256_storeu_pd(a + j, _mm256_mul_pd(_mm256_loadu_pd(a + j), e));
  }
  if (j < n) {
    alignas(32) double buf[kLanes] = {0, 0, 0, 0};
    for (std::size_t k = 0; j + k < n; ++k) buf[k] = x[j + k];
    _mm256_store_pd(buf, exp_pd(_mm256_mul_pd(cv, _mm256_load_pd(buf))));
    for (std::size_t k = 0; j + k < n; ++k) a[j + k] *= buf[k];
  }
}

Moments exp_moments(const double* c, const double* v, std::size_t n, double x) {
  const __m256d nx = _mm256_set1_pd(-x);
  __m256d val = _mm256_setzero_pd();
  __m256d slope = _mm256_setzero_pd();
  std::size_t i = 0;
  auto step = [&](__m256d cv, __m256d vv) {
    const __m256d t = _mm256_mul_pd(_mm256_mul_pd(cv, vv), exp_pd(_mm256_mul_pd(vv, nx)));
    val = _mm256_add_pd(val, t);
    slope = _mm256_fmadd_pd(t, vv, slope);
  };
  for (; i + kLanes <= n; i += kLanes) step(_mm256_loadu_pd(c + i), _mm256_loadu_pd(v + i));
  if (i < n) {
    alignas(32) double cb[kLanes] = {0, 0, 0, 0};
    alignas(32) double vb[kLanes] = {0, 0, 0, 0};
    for (std::size_t k = 0; i + k < n; ++k) {
      cb[k] = c[i + k];
      vb[k] = v[i + k];
    }
    step(_mm256_load_pd(cb), _mm256_load_pd(vb));
  }
  return {hsum(val), hsum(slope)};
}

void exp_array(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double buf[kLanes] = {0, 0, 0, 0};
    for (std::size_t k = 0; i + k < n; ++k) buf[k] = x[i + k];
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = buf[k];
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{
      "avx2",      sum,        row_sums, col_sums,     col_weighted_sums,
      scale_rows,  scale_cols, multiply, minimum,      guarded_ratio,
      gibbs,       scale_by_exp, exp_moments, exp_array,
  };
  return t;
}

}  // namespace otrepair::simd::avx2

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "otrepair/histogram.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/support.hpp"

namespace testing {

using namespace otrepair;

inline SupportPtr grid(long lo, long hi) { return make_support(Support::integer_grid(lo, hi)); }

inline Histogram hist(SupportPtr s, std::vector<double> m) {
  return Histogram(std::move(s), std::move(m));
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n,
                                          double floor = 0.01) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  return p;
}

inline Histogram random_histogram(std::mt19937_64& rng, const SupportPtr& s,
                                  double floor = 0.01) {
  return make_histogram(s, random_simplex(rng, s->size(), floor));
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = 0.01,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (auto& x : m.values()) x = u(rng);
  return m;
}

// Mixed-sign vector with at least one strictly negative and one strictly
// positive entry.
inline std::vector<double> mixed_signs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  v[0] = -std::abs(v[0]) - 0.05;
  v[n - 1] = std::abs(v[n - 1]) + 0.05;
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

}  // namespace testing

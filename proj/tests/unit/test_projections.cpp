#include <cmath>
#include <random>

#include "doctest.h"
#include "otrepair/band_root.hpp"
#include "otrepair/errors.hpp"
#include "otrepair/prox.hpp"
#include "unit/helpers.hpp"

using namespace otrepair;
using namespace testing;
using doctest::Approx;

namespace {

const Matrix kRowExample{{0.2, 0.2}, {0.1, 0.5}};

ConstraintSet random_set(std::mt19937_64& rng, int kind, std::size_t r, std::size_t c) {
  switch (kind) {
    case 0: return RowEq{random_simplex(rng, r)};
    case 1: return ColEq{random_simplex(rng, c)};
    case 2: return RowLeq{random_simplex(rng, r)};
    case 3: return ColLeq{random_simplex(rng, c)};
    case 4: return TotalMass{std::uniform_real_distribution<double>(0.1, 3.0)(rng)};
    case 5: return Capacity{random_matrix(rng, r, c, 0.0, 0.1)};
    default: {
      std::uniform_real_distribution<double> th(0.0, 0.05);
      std::vector<double> theta(c);
      for (auto& t : theta) t = th(rng);
      return ParityBand{mixed_signs(rng, r), theta};
    }
  }
}

}  // namespace

TEST_SUITE("projections") {

TEST_CASE("row equality examples") {
  const auto out = prox_row_eq(kRowExample, std::vector<double>{0.5, 0.5});
  CHECK(out(0, 0) == Approx(0.25).epsilon(1e-15));
  CHECK(out(0, 1) == Approx(0.25).epsilon(1e-15));
  CHECK(out(1, 0) == Approx(1.0 / 12).epsilon(1e-15));
  CHECK(out(1, 1) == Approx(5.0 / 12).epsilon(1e-15));

  const Matrix fixed{{0.1, 0.4}, {0.3, 0.2}};
  CHECK(prox_row_eq(fixed, std::vector<double>{0.5, 0.5}) == fixed);
  CHECK_THROWS_AS(prox_row_eq(Matrix{{0, 0}, {1, 1}}, std::vector<double>{0.5, 0.5}),
                  SolverError);
  // A zero row with a zero target passes through.
  const auto z = prox_row_eq(Matrix{{0, 0}, {1, 1}}, std::vector<double>{0.0, 1.0});
  CHECK(z(0, 0) == 0.0);
  CHECK(z(1, 1) == 0.5);
}

TEST_CASE("column equality is the transpose of row equality") {
  const auto rows = prox_row_eq(kRowExample, std::vector<double>{0.5, 0.5});
  const auto cols = prox_col_eq(kRowExample.transposed(), std::vector<double>{0.5, 0.5});
  CHECK(max_abs_diff(rows.transposed(), cols) == 0.0);
  const Matrix fixed{{0.1, 0.4}, {0.4, 0.1}};
  CHECK(prox_col_eq(fixed, std::vector<double>{0.5, 0.5}) == fixed);
  CHECK_THROWS_AS(prox_col_eq(Matrix{{0, 1}, {0, 1}}, std::vector<double>{0.5, 0.5}),
                  SolverError);
}

TEST_CASE("row and column inequality examples") {
  const Matrix inside{{0.1, 0.1}, {0.2, 0.1}};
  CHECK(prox_row_leq(inside, std::vector<double>{0.5, 0.5}) == inside);
  CHECK(prox_col_leq(inside, std::vector<double>{0.5, 0.5}) == inside);
  const auto r = prox_row_leq(Matrix{{0.4, 0.4}}, std::vector<double>{0.5});
  CHECK(r(0, 0) == Approx(0.25));
  CHECK(r(0, 1) == Approx(0.25));
  const auto c = prox_col_leq(Matrix{{0.4}, {0.4}}, std::vector<double>{0.5});
  CHECK(c(0, 0) == Approx(0.25));
  CHECK(c(1, 0) == Approx(0.25));
  CHECK(prox_row_leq(inside, std::vector<double>{0, 0}) == Matrix(2, 2, 0.0));
  CHECK(prox_col_leq(inside, std::vector<double>{0, 0}) == Matrix(2, 2, 0.0));
}

TEST_CASE("total mass examples") {
  const Matrix m{{0.5, 0.5}, {0.5, 0.5}};
  CHECK(prox_total_mass(m, 2.0) == m);
  CHECK(prox_total_mass(m, 1.0)(1, 1) == 0.25);
  CHECK(prox_total_mass(m, 0.0) == Matrix(2, 2, 0.0));
  CHECK_THROWS_AS(prox_total_mass(Matrix(2, 2, 0.0), 1.0), SolverError);
}

TEST_CASE("capacity examples") {
  const Matrix m{{0.5, 0.1}};
  CHECK(prox_capacity(m, Matrix(1, 2, 1e300)) == m);
  CHECK(prox_capacity(Matrix{{0.5}}, Matrix{{0.2}})(0, 0) == 0.2);
  CHECK(prox_capacity(m, Matrix(1, 2, 0.0)) == Matrix(1, 2, 0.0));
}

TEST_CASE("band multiplier examples") {
  const std::vector<double> col{0.1, 0.4}, v{-1.0, 1.0};
  const auto r = solve_band_multiplier(col, v, 0.0);
  CHECK(std::abs(r.value - std::log(2.0)) < 1e-12);
  CHECK(r.side == BandSide::upper);

  // column . v already equals the target.
  const auto z = solve_band_multiplier(col, v, 0.1 * -1.0 + 0.4 * 1.0);
  CHECK(std::abs(z.value) < 1e-12);

  const auto neg = solve_band_multiplier(std::vector<double>{0.4, 0.1}, v, 0.0);
  CHECK(neg.value < 0.0);
  CHECK(neg.side == BandSide::lower);

  CHECK_THROWS_AS(solve_band_multiplier(std::vector<double>{0.1, 0.0}, v, 0.0), SolverError);
}

TEST_CASE("band multiplier on random bracketed problems") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 9);
    const auto v = mixed_signs(rng, n);
    auto col = random_simplex(rng, n);
    const double target = u(rng);
    const auto r = solve_band_multiplier(col, v, target);
    double f = -target;
    for (std::size_t i = 0; i < n; ++i) f += col[i] * v[i] * std::exp(-v[i] * r.value);
    CHECK(std::abs(f) < 1e-10);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += col[i] * v[i];
    if (dot > target) CHECK(r.value > 0.0);
    if (dot < target) CHECK(r.value < 0.0);
  }
}

TEST_CASE("band function is non-increasing") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto v = mixed_signs(rng, 6);
    const auto col = random_simplex(rng, 6);
    double prev = INFINITY;
    for (double x = -20.0; x <= 20.0; x += 0.25) {
      double f = 0.0;
      for (std::size_t i = 0; i < 6; ++i) f += col[i] * v[i] * std::exp(-v[i] * x);
      CHECK(f <= prev);
      prev = f;
    }
  }
}

TEST_CASE("parity band examples") {
  const Matrix col{{0.1}, {0.4}};
  const std::vector<double> v{-1.0, 1.0};
  const auto out = prox_parity_band(col, v, std::vector<double>{0.0});
  CHECK(out(0, 0) == Approx(0.2).epsilon(1e-12));
  CHECK(out(1, 0) == Approx(0.2).epsilon(1e-12));

  const Matrix inside{{0.2, 0.3}, {0.2, 0.31}};
  CHECK(prox_parity_band(inside, v, std::vector<double>{0.01, 0.02}) == inside);
}

TEST_CASE("parity band keeps V = 0 rows and inactive columns bit-exact") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto g = random_matrix(rng, 4, 5);
    auto v = mixed_signs(rng, 4);
    v[std::uniform_int_distribution<std::size_t>(0, 3)(rng)] = 0.0;
    if (*std::min_element(v.begin(), v.end()) >= 0.0 ||
        *std::max_element(v.begin(), v.end()) <= 0.0) {
      continue;
    }
    std::vector<double> theta(5, 0.02);
    // Open column 2 wide so it is never active.
    theta[2] = 1e6;
    const auto out = prox_parity_band(g, v, theta);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(out(i, 2) == g(i, 2));
      if (v[i] == 0.0) {
        for (std::size_t j = 0; j < 5; ++j) CHECK(out(i, j) == g(i, j));
      }
    }
  }
}

TEST_CASE("every prox is idempotent and lands in its set") {
  std::mt19937_64 rng(1234);
  for (int kind = 0; kind < 7; ++kind) {
    for (int t = 0; t < 200; ++t) {
      const std::size_t r = 2 + static_cast<std::size_t>(t % 3);
      const std::size_t c = 2 + static_cast<std::size_t>((t / 3) % 3);
      const auto set = random_set(rng, kind, r, c);
      Matrix once = random_matrix(rng, r, c);
      project(set, once);
      Matrix twice = once;
      project(set, twice);
      CAPTURE(kind_name(set));
      CHECK(max_abs_diff(once, twice) <= 1e-12);
      CHECK(violation(set, once) <= 1e-9);
    }
  }
}

TEST_CASE("shape checks") {
  CHECK_THROWS_AS(check_shape(RowEq{{0.5, 0.5}}, 3, 2), ValidationError);
  CHECK_THROWS_AS(check_shape(Capacity{Matrix(2, 2)}, 2, 3), ValidationError);
  CHECK_THROWS_AS(check_shape(ParityBand{{1, -1}, {0.1}}, 2, 2), ValidationError);
  CHECK_NOTHROW(check_shape(ParityBand{{1, -1}, {0.1, 0.1}}, 2, 2));
  CHECK(kind_name(TotalMass{1.0}) == "total_mass");
}

}

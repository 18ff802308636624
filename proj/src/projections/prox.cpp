#include "otrepair/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "otrepair/errors.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// target / current with 0/0 := 1; a positive target over zero mass is an error.
double equality_factor(double target, double current, const char* axis, std::size_t index) {
  if (current > 0.0) return target / current;
  if (target == 0.0) return 1.0;
  throw SolverError(std::string("mass cannot be created: ") + axis + " " + std::to_string(index) +
                    " has zero mass but a positive target");
}

double inequality_factor(double bound, double current) {
  if (current > bound) return bound / current;
  return 1.0;
}

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

void project_row_eq(Matrix& g, std::span<const double> p) {
  require(p.size() == g.rows(), "prox_row_eq: length != rows");
  std::vector<double> f = g.row_sums();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = equality_factor(p[i], f[i], "row", i);
  simd::active().scale_rows(g.data(), g.rows(), g.cols(), f.data());
}

void project_col_eq(Matrix& g, std::span<const double> q) {
  require(q.size() == g.cols(), "prox_col_eq: length != cols");
  std::vector<double> f = g.col_sums();
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = equality_factor(q[j], f[j], "column", j);
  simd::active().scale_cols(g.data(), g.rows(), g.cols(), f.data());
}

void project_row_leq(Matrix& g, std::span<const double> p) {
  require(p.size() == g.rows(), "prox_row_leq: length != rows");
  std::vector<double> f = g.row_sums();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = inequality_factor(p[i], f[i]);
  simd::active().scale_rows(g.data(), g.rows(), g.cols(), f.data());
}

void project_col_leq(Matrix& g, std::span<const double> q) {
  require(q.size() == g.cols(), "prox_col_leq: length != cols");
  std::vector<double> f = g.col_sums();
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = inequality_factor(q[j], f[j]);
  simd::active().scale_cols(g.data(), g.rows(), g.cols(), f.data());
}

void project_total_mass(Matrix& g, double eta) {
  const double total = g.total();
  const double f = equality_factor(eta, total, "matrix", 0);
  if (f == 1.0) return;
  for (double& x : g.values()) x *= f;
}

void project_capacity(Matrix& g, const Matrix& cap) {
  require(cap.same_shape(g), "prox_capacity: shape mismatch");
  simd::active().minimum(g.data(), cap.data(), g.size());
}

void project_parity_band(Matrix& g, std::span<const double> v, std::span<const double> theta) {
  require(v.size() == g.rows(), "prox_parity_band: v length != rows");
  require(theta.size() == g.cols(), "prox_parity_band: theta length != cols");
  const auto& k = simd::active();
  const std::size_t rows = g.rows();
  const std::size_t cols = g.cols();

  std::vector<double> s(cols);
  k.col_weighted_sums(g.data(), rows, cols, v.data(), s.data());

  std::vector<std::size_t> active_rows;
  std::vector<double> v_active;
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i] != 0.0) {
      active_rows.push_back(i);
      v_active.push_back(v[i]);
    }
  }

  std::vector<double> nu(cols, 0.0);
  std::vector<double> column(active_rows.size());
  bool any = false;
  for (std::size_t j = 0; j < cols; ++j) {
    if (std::abs(s[j]) <= theta[j] + kBandActivationSlack) continue;
    for (std::size_t a = 0; a < active_rows.size(); ++a) column[a] = g(active_rows[a], j);
    const double target = s[j] > 0.0 ? theta[j] : -theta[j];
    nu[j] = solve_band_multiplier(column, v_active, target, j).value;
    any = any || nu[j] != 0.0;
  }
  if (!any) return;
  // exp(0) == 1 exactly, so inactive columns are left bit-identical.
  for (std::size_t a = 0; a < active_rows.size(); ++a) {
    k.scale_by_exp(g.row(active_rows[a]).data(), nu.data(), -v_active[a], cols);
  }
}

}  // namespace

Matrix prox_row_eq(Matrix gamma_bar, std::span<const double> p) {
  project_row_eq(gamma_bar, p);
  return gamma_bar;
}

Matrix prox_col_eq(Matrix gamma_bar, std::span<const double> q) {
  project_col_eq(gamma_bar, q);
  return gamma_bar;
}

Matrix prox_row_leq(Matrix gamma_bar, std::span<const double> p) {
  project_row_leq(gamma_bar, p);
  return gamma_bar;
}

Matrix prox_col_leq(Matrix gamma_bar, std::span<const double> q) {
  project_col_leq(gamma_bar, q);
  return gamma_bar;
}

Matrix prox_total_mass(Matrix gamma_bar, double eta) {
  project_total_mass(gamma_bar, eta);
  return gamma_bar;
}

Matrix prox_capacity(Matrix gamma_bar, const Matrix& cap) {
  project_capacity(gamma_bar, cap);
  return gamma_bar;
}

Matrix prox_parity_band(Matrix gamma_bar, std::span<const double> v,
                        std::span<const double> theta) {
  project_parity_band(gamma_bar, v, theta);
  return gamma_bar;
}

Matrix prox_parity_band(Matrix gamma_bar, const DisparityVector& v, const RepairBand& theta) {
  project_parity_band(gamma_bar, v.values(), theta.values());
  return gamma_bar;
}

void project(const ConstraintSet& set, Matrix& gamma) {
  std::visit(overloaded{
                 [&](const RowEq& s) { project_row_eq(gamma, s.p); },
                 [&](const ColEq& s) { project_col_eq(gamma, s.q); },
                 [&](const RowLeq& s) { project_row_leq(gamma, s.p); },
                 [&](const ColLeq& s) { project_col_leq(gamma, s.q); },
                 [&](const TotalMass& s) { project_total_mass(gamma, s.eta); },
                 [&](const Capacity& s) { project_capacity(gamma, s.cap); },
                 [&](const ParityBand& s) { project_parity_band(gamma, s.v, s.theta); },
             },
             set);
}

double violation(const ConstraintSet& set, const Matrix& gamma) {
  check_shape(set, gamma.rows(), gamma.cols());
  auto l1 = [](std::span<const double> got, std::span<const double> want) {
    double r = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) r += std::abs(got[i] - want[i]);
    return r;
  };
  auto excess = [](std::span<const double> got, std::span<const double> bound) {
    double r = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) r += std::max(0.0, got[i] - bound[i]);
    return r;
  };
  return std::visit(
      overloaded{
          [&](const RowEq& s) { return l1(gamma.row_sums(), s.p); },
          [&](const ColEq& s) { return l1(gamma.col_sums(), s.q); },
          [&](const RowLeq& s) { return excess(gamma.row_sums(), s.p); },
          [&](const ColLeq& s) { return excess(gamma.col_sums(), s.q); },
          [&](const TotalMass& s) { return std::abs(gamma.total() - s.eta); },
          [&](const Capacity& s) { return excess(gamma.values(), s.cap.values()); },
          [&](const ParityBand& s) {
            std::vector<double> t(gamma.cols());
            simd::active().col_weighted_sums(gamma.data(), gamma.rows(), gamma.cols(),
                                             s.v.data(), t.data());
            double r = 0.0;
            for (std::size_t j = 0; j < t.size(); ++j) {
              r += std::max(0.0, std::abs(t[j]) - s.theta[j]);
            }
            return r;
          },
      },
      set);
}

}  // namespace otrepair

#include "otrepair/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "otrepair/divergence.hpp"
#include "otrepair/errors.hpp"
#include "otrepair/prox.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {

std::optional<RepairBand> ThetaSpec::band(const SupportPtr& target) const {
  switch (kind) {
    case Kind::none:
      return std::nullopt;
    case Kind::zero:
      return RepairBand::zero(target);
    case Kind::uniform:
      return RepairBand::uniform(target, value);
    case Kind::vector:
      return RepairBand(target, values);
  }
  return std::nullopt;
}

ThetaSpec ThetaSpec::parse(const std::string& text) {
  ThetaSpec t;
  if (text == "zero" || text == "0") {
    t.kind = Kind::zero;
    return t;
  }
  if (text == "none") return t;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError("theta must be 'zero', 'none' or a nonnegative number, got '" + text +
                          "'");
  }
  t.kind = v == 0.0 ? Kind::zero : Kind::uniform;
  t.value = v;
  return t;
}

void SolveConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive");
  }
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(residual_tol >= 0.0)) throw ValidationError("residual_tol must be nonnegative");
}

void to_json(nlohmann::json& j, const ThetaSpec& t) {
  switch (t.kind) {
    case ThetaSpec::Kind::none:
      j = {{"kind", "none"}};
      break;
    case ThetaSpec::Kind::zero:
      j = {{"kind", "zero"}};
      break;
    case ThetaSpec::Kind::uniform:
      j = {{"kind", "uniform"}, {"value", t.value}};
      break;
    case ThetaSpec::Kind::vector:
      j = {{"kind", "vector"}, {"values", t.values}};
      break;
  }
}

void from_json(const nlohmann::json& j, ThetaSpec& t) {
  const std::string kind = j.at("kind").get<std::string>();
  t = ThetaSpec{};
  if (kind == "none") {
    t.kind = ThetaSpec::Kind::none;
  } else if (kind == "zero") {
    t.kind = ThetaSpec::Kind::zero;
  } else if (kind == "uniform") {
    t.kind = ThetaSpec::Kind::uniform;
    t.value = j.at("value").get<double>();
    if (!(t.value >= 0.0)) throw ValidationError("theta value must be nonnegative");
  } else if (kind == "vector") {
    t.kind = ThetaSpec::Kind::vector;
    t.values = j.at("values").get<std::vector<double>>();
  } else {
    throw ValidationError("unknown theta kind '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const SolveConfig& c) {
  j = {{"epsilon", c.epsilon},
       {"max_iters", c.max_iters},
       {"residual_tol", c.residual_tol},
       {"theta", c.theta}};
}

void from_json(const nlohmann::json& j, SolveConfig& c) {
  c = SolveConfig{};
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
  if (j.contains("residual_tol")) c.residual_tol = j.at("residual_tol").get<double>();
  if (j.contains("theta")) c.theta = j.at("theta").get<ThetaSpec>();
  c.validate();
}

void to_json(nlohmann::json& j, const SolveReport& r) {
  j = {{"iterations_run", r.iterations_run},
       {"final_residuals", r.final_residuals},
       {"kl_to_kernel", r.kl_to_kernel},
       {"converged", r.converged}};
}

std::vector<double> residuals(const Matrix& gamma, const std::vector<ConstraintSet>& cycle) {
  std::vector<double> r;
  r.reserve(cycle.size());
  for (const auto& set : cycle) r.push_back(violation(set, gamma));
  return r;
}

namespace {

void require_positive_kernel(const Matrix& xi) {
  if (xi.empty()) throw ValidationError("kernel is empty");
  for (double x : xi.values()) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ValidationError("kernel entries must be finite and strictly positive");
    }
  }
}

[[noreturn]] void blow_up(int iteration) {
  throw SolverError("numerical blow-up: decrease K or increase epsilon (iteration " +
                    std::to_string(iteration) + ")");
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

SolveResult dykstra(const Matrix& xi, const SolveConfig& config) {
  config.validate();
  if (config.cycle.empty()) throw ValidationError("dykstra: constraint cycle is empty");
  require_positive_kernel(xi);
  for (const auto& set : config.cycle) check_shape(set, xi.rows(), xi.cols());

  const auto& k = simd::active();
  const std::size_t length = config.cycle.size();
  SolveResult out{xi, {}};
  Matrix& gamma = out.coupling;
  SolveReport& report = out.report;

  // An empty correction means all ones (the first pass over the cycle).
  std::vector<Matrix> corrections(length);
  Matrix z;

  for (int it = 0; it < config.max_iters; ++it) {
    const std::size_t l = static_cast<std::size_t>(it) % length;
    z = gamma;
    if (!corrections[l].empty()) k.multiply(z.data(), corrections[l].data(), z.size());
    gamma = z;
    try {
      project(config.cycle[l], gamma);
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(it) + " (" +
                        std::string(kind_name(config.cycle[l])) + "): " + e.what());
    }
    k.guarded_ratio(z.data(), gamma.data(), z.size(), kCorrectionFloor);
    std::swap(corrections[l], z);
    report.iterations_run = it + 1;

    if (l + 1 == length) {
      if (!std::isfinite(gamma.total())) blow_up(it);
      report.final_residuals = residuals(gamma, config.cycle);
      const double worst = max_of(report.final_residuals);
      if (!std::isfinite(worst)) blow_up(it);
      report.residual_history.push_back(worst);
      if (worst < config.residual_tol) {
        report.converged = true;
        break;
      }
    }
  }
  if (!std::isfinite(gamma.total())) blow_up(report.iterations_run);
  report.final_residuals = residuals(gamma, config.cycle);
  report.converged = max_of(report.final_residuals) < config.residual_tol;
  report.kl_to_kernel = kl_divergence(gamma, xi);
  return out;
}

SolveResult bregman_iterate(const Matrix& xi, const Histogram& p, const Histogram& q,
                            int max_iters, double tol) {
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  require_positive_kernel(xi);
  const std::vector<ConstraintSet> cycle{row_eq(p), col_eq(q)};
  for (const auto& set : cycle) check_shape(set, xi.rows(), xi.cols());

  SolveResult out{xi, {}};
  Matrix& gamma = out.coupling;
  SolveReport& report = out.report;
  for (int it = 0; it < max_iters; ++it) {
    const std::size_t l = static_cast<std::size_t>(it) % 2;
    try {
      project(cycle[l], gamma);
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(it) + " (" +
                        std::string(kind_name(cycle[l])) + "): " + e.what());
    }
    report.iterations_run = it + 1;
    if (l == 1) {
      report.final_residuals = residuals(gamma, cycle);
      const double worst = max_of(report.final_residuals);
      if (!std::isfinite(worst)) blow_up(it);
      report.residual_history.push_back(worst);
      if (worst < tol) break;
    }
  }
  if (!std::isfinite(gamma.total())) blow_up(report.iterations_run);
  report.final_residuals = residuals(gamma, cycle);
  report.converged = max_of(report.final_residuals) < tol;
  report.kl_to_kernel = kl_divergence(gamma, xi);
  return out;
}

SolveResult solve_repair_coupling(const Histogram& p_x, const Histogram& p_xt,
                                  const DisparityVector& v, const RepairBand& theta,
                                  const CostMatrix& c, double epsilon, int max_iters,
                                  double residual_tol) {
  if (v.size() != p_x.size()) throw ValidationError("disparity vector does not match source");
  if (theta.size() != p_xt.size()) throw ValidationError("repair band does not match target");
  SolveConfig config;
  config.epsilon = epsilon;
  config.max_iters = max_iters;
  config.residual_tol = residual_tol;
  config.cycle = {row_eq(p_x), col_eq(p_xt), parity_band(v, theta)};
  return dykstra(gibbs_kernel(c, epsilon), config);
}

SolveResult solve_barycentre_coupling(const Histogram& p_s0, const Histogram& p_s1,
                                      const CostMatrix& c, double epsilon, int max_iters,
                                      double residual_tol) {
  if (!same_support(p_s0, p_s1)) {
    throw ValidationError("barycentre coupling: group histograms must share a support");
  }
  return bregman_iterate(gibbs_kernel(c, epsilon), p_s0, p_s1, max_iters, residual_tol);
}

namespace {

// Resolves convex combinations of support points to support indices.
class BarycentreLocator {
 public:
  explicit BarycentreLocator(const Support& s) : support_(s), integral_(true) {
    for (double x : s.coords()) {
      if (x != std::floor(x)) {
        integral_ = false;
        break;
      }
    }
  }

  std::size_t locate(std::vector<double>& point) {
    if (integral_) {
      for (double& x : point) x = std::ceil(x - 0.5);
    }
    if (auto hit = support_.find(point)) return *hit;
    auto cached = memo_.find(point);
    if (cached != memo_.end()) return cached->second;
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const auto q = support_.point(i);
      double d = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) d += std::abs(q[k] - point[k]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    memo_.emplace(point, best);
    return best;
  }

 private:
  const Support& support_;
  bool integral_;
  std::map<std::vector<double>, std::size_t> memo_;
};

}  // namespace

GroupMaps barycentre_group_maps(const Coupling& gamma_b, double pi0, const Support& support) {
  if (!(pi0 > 0.0 && pi0 <= 1.0)) throw ValidationError("pi0 must lie in (0, 1]");
  const std::size_t n = support.size();
  if (gamma_b.rows() != n || gamma_b.cols() != n) {
    throw ValidationError("barycentre coupling does not match the support");
  }
  const double pi1 = 1.0 - pi0;
  const std::size_t d = support.dim();
  BarycentreLocator locator(support);
  GroupMaps maps{Coupling(n, n), Coupling(n, n)};
  std::vector<double> point(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = support.point(i);
    for (std::size_t kk = 0; kk < n; ++kk) {
      const double m = gamma_b(i, kk);
      if (m == 0.0) continue;
      const auto xk = support.point(kk);
      for (std::size_t a = 0; a < d; ++a) point[a] = pi0 * xi[a] + pi1 * xk[a];
      const std::size_t b = locator.locate(point);
      maps.to_barycentre_0(i, b) += m;
      maps.to_barycentre_1(kk, b) += m;
    }
  }
  return maps;
}

}  // namespace otrepair

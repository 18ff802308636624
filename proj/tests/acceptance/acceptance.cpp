// Acceptance checks. `otrepair_acceptance N` runs criterion N; with no
// argument every criterion runs. Each criterion prints one result line
//
//   criterion N: PASS|FAIL|SKIPPED  <summary>
//
// followed by indented detail lines. The exit status is 0 on PASS, 1 on FAIL
// and 77 on SKIPPED (single-criterion mode).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "otrepair/band_root.hpp"
#include "otrepair/data_io.hpp"
#include "otrepair/divergence.hpp"
#include "otrepair/experiments.hpp"
#include "otrepair/metrics.hpp"
#include "otrepair/prox.hpp"
#include "otrepair/repair.hpp"
#include "otrepair/solver.hpp"
#include "otrepair/transport.hpp"
#include "prox_vs_oracle.hpp"

using namespace otrepair;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skipped };

struct Outcome {
  Status status = Status::pass;
  std::string summary;
  std::vector<std::string> details;

  // Records a sub-check; any failing sub-check fails the criterion.
  void check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    if (!ok) status = Status::fail;
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SupportPtr grid(long lo, long hi) { return make_support(Support::integer_grid(lo, hi)); }

std::vector<double> simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  return p;
}

fs::path adult_dir() {
  if (const char* env = std::getenv("OTREPAIR_ADULT_DIR")) return env;
  return OTREPAIR_ADULT_DIR;
}

bool adult_present() {
  return fs::exists(adult_dir() / "adult.data") && fs::exists(adult_dir() / "adult.test");
}

// ---------------------------------------------------------------------------

Outcome prox_oracle() {
  Outcome o;
  std::mt19937_64 rng(1);
  int total = 0, good = 0;
  for (const char* kind : testing::kProxKinds) {
    double worst_kl = 0.0, worst_entry = 0.0;
    int ok = 0;
    for (int t = 0; t < 50; ++t) {
      const auto inst = testing::random_instance(rng, kind);
      const auto c = testing::compare_with_oracle(inst);
      worst_kl = std::max(worst_kl, c.kl_gap);
      worst_entry = std::max(worst_entry, c.max_entry);
      ok += c.kl_gap < 1e-6 && c.max_entry < 1e-5;
    }
    o.check(ok == 50, fmt("%-11s %2d/50 within tolerance, worst KL gap %.2e, worst entry %.2e",
                          kind, ok, worst_kl, worst_entry));
    total += 50;
    good += ok;
  }
  o.summary = fmt("%d/%d prox instances match the brute-force oracle", good, total);
  return o;
}

Outcome feasibility_fixture() {
  Outcome o;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto sx = grid(0, 2 + t % 7);
    const auto st = grid(0, 1 + (t * 3) % 9);
    const auto p0 = make_histogram(sx, simplex(rng, sx->size()));
    const auto p1 = make_histogram(sx, simplex(rng, sx->size()));
    std::vector<double> mix(sx->size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.35 * p0[i] + 0.65 * p1[i];
    const auto px = make_histogram(sx, mix);
    const auto q = make_histogram(st, simplex(rng, st->size()));
    const auto v = disparity_vector(p0, p1, px);
    const std::vector<ConstraintSet> cycle{row_eq(px), col_eq(q),
                                           parity_band(v, RepairBand::zero(st))};
    for (double r : residuals(product_coupling(px, q), cycle)) worst = std::max(worst, r);
  }
  o.check(worst < 1e-12, fmt("worst residual over 20 pairs x {RowEq, ColEq, ParityBand}: %.2e",
                             worst));
  o.summary = fmt("product coupling feasible, worst residual %.2e", worst);
  return o;
}

Outcome analytic_instance() {
  Outcome o;
  const auto s = grid(0, 1);
  const Histogram px(s, {0.5, 0.5});
  const DisparityVector v(s, {-2.0 / 3, 2.0 / 3});
  const double w[] = {1.0};
  const auto r = solve_repair_coupling(px, px, v, RepairBand::zero(s), cost_matrix(*s, *s, w), 0.01);
  double dev = 0.0;
  for (double x : r.coupling.values()) dev = std::max(dev, std::abs(x - 0.25));
  o.check(dev < 1e-6, fmt("coupling within %.2e of the uniform 1/4 coupling", dev));

  WeightedDataset d;
  d.feature_names = {"x"};
  const std::pair<double, int> rows[] = {{0, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}};
  for (auto [x, g] : rows) {
    WeightedSample smp;
    smp.features = {x};
    smp.group = g;
    d.samples.push_back(smp);
  }
  const auto out = apply_map(d, projection_map(prox_row_eq(r.coupling, px.mass()), px, s));
  const auto groups = groupwise_distributions(out.data);
  // The solver's coupling is 1/4 only up to rounding, so "exactly [1/2, 1/2]"
  // is checked at 1e-12; bit equality is reported separately.
  double gdev = 0.0;
  bool bitwise = true;
  for (int g : {0, 1}) {
    for (int i : {0, 1}) {
      gdev = std::max(gdev, std::abs(groups.at(g)[i] - 0.5));
      bitwise = bitwise && groups.at(g)[i] == 0.5;
    }
  }
  o.check(gdev < 1e-12, fmt("group-wise distributions [%.17g, %.17g] and [%.17g, %.17g], "
                            "max deviation %.2e",
                            groups.at(0)[0], groups.at(0)[1], groups.at(1)[0], groups.at(1)[1],
                            gdev));
  o.note(bitwise ? "group-wise distributions are bit-exact" : "not bit-exact (rounding only)");
  o.check(out.data.samples.size() == 12, fmt("%zu repaired samples", out.data.samples.size()));
  o.summary = "two-point instance repaired to identical group distributions";
  return o;
}

Outcome synthetic_reproduction() {
  Outcome o;
  SyntheticConfig c;  // N = 41, M = 10^4, epsilon = 0.01, K = 600
  c.seed = 1;
  const auto r = synthetic_experiment(c);
  std::map<std::string, const SyntheticArm*> arm;
  for (const auto& a : r.arms) {
    arm[a.name] = &a;
    o.note(fmt("%-13s s-wise TV %.5f  TV to target %.5f  residual %.2e", a.name.c_str(),
               a.s_wise_tv, a.tv_to_target,
               a.report.final_residuals.empty()
                   ? 0.0
                   : *std::max_element(a.report.final_residuals.begin(),
                                       a.report.final_residuals.end())));
  }
  const auto& total = *arm.at("total-repair");
  const auto& t3 = *arm.at("0.001-repair");
  const auto& t2 = *arm.at("0.01-repair");
  o.check(total.s_wise_tv < 0.01, fmt("(a) total repair s-wise TV %.5f < 0.01", total.s_wise_tv));
  o.check(t3.s_wise_tv <= 0.0205 && t3.bound->holds,
          fmt("(b) theta 1e-3: TV %.5f <= 0.0205, band check %.5f <= %.5f", t3.s_wise_tv,
              t3.bound->achieved_tv, t3.bound->tv_bound));
  o.check(t2.s_wise_tv <= 0.205 && t2.bound->holds,
          fmt("(b) theta 1e-2: TV %.5f <= 0.205, band check %.5f <= %.5f", t2.s_wise_tv,
              t2.bound->achieved_tv, t2.bound->tv_bound));
  for (const auto& a : r.arms) {
    if (a.name == "Origin") continue;
    o.check(a.tv_to_target < 0.01,
            fmt("(c) %s group-blind TV to target %.5f < 0.01", a.name.c_str(), a.tv_to_target));
  }
  const double chain[] = {arm.at("Origin")->s_wise_tv, arm.at("Baseline")->s_wise_tv,
                          t2.s_wise_tv, t3.s_wise_tv, total.s_wise_tv};
  bool ordered = true;
  for (int k = 0; k + 1 < 5; ++k) ordered = ordered && chain[k] >= chain[k + 1];
  o.check(ordered, fmt("(d) ordering %.4f >= %.4f >= %.4f >= %.4f >= %.4f", chain[0], chain[1],
                       chain[2], chain[3], chain[4]));
  o.summary = fmt("total repair s-wise TV %.5f, theta bounds and ordering checked",
                  total.s_wise_tv);
  return o;
}

Outcome dykstra_bregman() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> size(2, 12);
  std::uniform_real_distribution<double> eps(0.05, 1.0), gw(0.05, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto sp = grid(0, size(rng) - 1);
    const auto sq = grid(0, size(rng) - 1);
    const auto p = make_histogram(sp, simplex(rng, sp->size()));
    const auto q = make_histogram(sq, simplex(rng, sq->size()));
    const double w[] = {gw(rng)};
    const auto xi = gibbs_kernel(cost_matrix(*sp, *sq, w), eps(rng));
    SolveConfig cfg;
    cfg.max_iters = 20000;
    cfg.residual_tol = 1e-13;
    cfg.cycle = {row_eq(p), col_eq(q)};
    const auto a = dykstra(xi, cfg);
    const auto b = bregman_iterate(xi, p, q, 20000, 1e-13);
    worst = std::max(worst, max_abs_diff(a.coupling, b.coupling));
  }
  o.check(worst < 1e-8, fmt("worst entrywise difference over 20 instances %.2e", worst));
  o.summary = fmt("affine-only Dykstra and alternating scaling agree to %.2e", worst);
  return o;
}

Outcome table_one() {
  Outcome o;
  if (!adult_present()) {
    o.status = Status::skipped;
    o.summary = "adult dataset not found (run tools/fetch_adult.sh)";
    return o;
  }
  const std::map<std::string, std::pair<double, double>> expected{
      {"age", {0.0415, 0.1010}},          {"education-num", {0.1187, 0.0710}},
      {"capital-gain", {0.0268, 0.0369}}, {"capital-loss", {0.0142, 0.0201}},
      {"hours-per-week", {0.1222, 0.1819}}};
  const auto race = load_adult(adult_dir(), AdultAttribute::race);
  const auto sex = load_adult(adult_dir(), AdultAttribute::sex);
  const auto tr = feature_selection_by_tv(race.data, adult_numeric_features(), 0.08);
  const auto ts = feature_selection_by_tv(sex.data, adult_numeric_features(), 0.08);
  int matched = 0;
  for (const auto& f : adult_numeric_features()) {
    const auto [er, es] = expected.at(f);
    const double r = tr.tv.at(f), s = ts.tv.at(f);
    const bool okr = std::abs(r - er) <= 0.0005, oks = std::abs(s - es) <= 0.0005;
    matched += okr + oks;
    o.check(okr, fmt("%-14s race-wise   %.4f (reference %.4f)", f.c_str(), r, er));
    o.check(oks, fmt("%-14s gender-wise %.4f (reference %.4f)", f.c_str(), s, es));
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  o.note("selected for race: " + join(tr.adjusted) + "; for sex: " + join(ts.adjusted));
  o.summary = fmt("%d/10 TV values within 0.0005 of the reference table", matched);
  return o;
}

Outcome adult_directional() {
  Outcome o;
  if (!adult_present()) {
    o.status = Status::skipped;
    o.summary = "adult dataset not found (run tools/fetch_adult.sh)";
    return o;
  }
  for (auto attr : {AdultAttribute::race, AdultAttribute::sex}) {
    const char* name = attr == AdultAttribute::race ? "race" : "sex";
    AdultConfig c;
    c.data_dir = adult_dir();
    c.attribute = attr;
    c.trials = 5;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = adult_experiment(c);
    std::map<std::string, MetricReport> mean;
    for (const auto& s : r.summary) mean[s.arm] = s.mean;
    const double origin = std::abs(mean.at("Origin").disparate_impact - 1.0);
    for (const auto& s : r.summary) {
      o.note(fmt("%-4s %-12s DI %.4f  s-wise TV %.4f  f1 micro %.4f", name, s.arm.c_str(),
                 s.mean.disparate_impact, s.mean.s_wise_tv, s.mean.f1_micro));
    }
    for (const char* arm : {"Barycentre", "1e-2-repair", "1e-3-repair"}) {
      const double d = std::abs(mean.at(arm).disparate_impact - 1.0);
      o.check(d < origin, fmt("%-4s %-12s |DI - 1| %.4f < Origin %.4f", name, arm, d, origin));
    }
    const double btv = mean.at("Barycentre").s_wise_tv;
    o.check(btv < 0.02, fmt("%-4s Barycentre s-wise TV %.4f < 0.02", name, btv));
    o.note(fmt("%-4s 5 trials in %.1f s", name, seconds_since(t0)));
  }
  o.summary = "directional disparate-impact and barycentre checks over 5 trials";
  return o;
}

Outcome root_finder() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_real_distribution<double> u(0.0, 1.0), sv(-3.0, 3.0), tg(-0.05, 0.05);
  int ok = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> col(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = u(rng) < 0.2 ? 0.0 : u(rng);
      v[i] = sv(rng);
    }
    // Bracketing condition: positive mass where v > 0 and where v < 0.
    col[0] = 0.01 + u(rng);
    v[0] = -0.01 - std::abs(v[0]);
    col[1] = 0.01 + u(rng);
    v[1] = 0.01 + std::abs(v[1]);
    const double target = tg(rng);
    try {
      const auto r = solve_band_multiplier(col, v, target);
      double f = -target;
      for (std::size_t i = 0; i < n; ++i) f += col[i] * v[i] * std::exp(-v[i] * r.value);
      worst = std::max(worst, std::abs(f));
      ok += std::abs(f) < 1e-10;
    } catch (const std::exception& e) {
      o.note(std::string("problem ") + std::to_string(t) + " threw: " + e.what());
    }
  }
  o.check(ok == 1000, fmt("%d/1000 converged, worst |F| %.2e", ok, worst));
  const std::vector<double> col{0.1, 0.4}, v{-1.0, 1.0};
  const double nu = solve_band_multiplier(col, v, 0.0).value;
  o.check(std::abs(nu - std::log(2.0)) < 1e-12,
          fmt("two-point closed form: nu = %.15f, ln 2 = %.15f", nu, std::log(2.0)));
  o.summary = fmt("%d/1000 band multipliers within 1e-10", ok);
  return o;
}

Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  int v_ok = 0;
  for (int t = 0; t < 200; ++t) {
    const auto s = grid(0, 1 + t % 12);
    const auto p0 = make_histogram(s, simplex(rng, s->size()));
    const auto p1 = make_histogram(s, simplex(rng, s->size()));
    const double pi0 = 0.05 + 0.9 * u(rng);
    std::vector<double> mix(s->size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = pi0 * p0[i] + (1 - pi0) * p1[i];
    const auto px = make_histogram(s, mix);
    const auto v = disparity_vector(p0, p1, px);
    double dot = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += px[i] * v[i];
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    v_ok += std::abs(dot) < 1e-10 && (v.is_zero() || (lo < 0.0 && hi > 0.0));
  }
  o.check(v_ok == 200, fmt("disparity vector sign properties: %d/200", v_ok));

  int idem_ok = 0, idem_total = 0;
  for (const char* kind : testing::kProxKinds) {
    for (int t = 0; t < 200; ++t) {
      const auto inst = testing::random_instance(rng, kind);
      const auto set = testing::to_set(inst);
      Matrix once(static_cast<std::size_t>(inst.rows), static_cast<std::size_t>(inst.cols),
                  inst.gamma_bar);
      project(set, once);
      Matrix twice = once;
      project(set, twice);
      idem_ok += max_abs_diff(once, twice) <= 1e-12;
      ++idem_total;
    }
  }
  o.check(idem_ok == idem_total, fmt("prox idempotence: %d/%d", idem_ok, idem_total));

  int mass_ok = 0;
  double mass_worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto s = grid(0, 5);
    const auto px = make_histogram(s, simplex(rng, 6));
    Matrix g(6, 6);
    for (auto& x : g.values()) x = u(rng) < 0.3 ? 0.0 : u(rng);
    for (std::size_t i = 0; i < 6; ++i) g(i, i) += 0.01;
    g = prox_row_eq(g, px.mass());
    const auto map = projection_map(g, px, s);
    WeightedDataset d;
    d.feature_names = {"x"};
    for (int k = 0; k < 50; ++k) {
      WeightedSample smp;
      smp.features = {static_cast<double>(k % 6)};
      smp.weight = 0.1 + u(rng);
      d.samples.push_back(smp);
    }
    const double diff = std::abs(apply_map(d, map).data.total_weight() - d.total_weight());
    mass_worst = std::max(mass_worst, diff);
    mass_ok += diff < 1e-9;
  }
  o.check(mass_ok == 200, fmt("apply_map mass conservation: %d/200, worst %.2e", mass_ok,
                              mass_worst));

  int f1_ok = 0, di_ok = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 20 + t % 30;
    std::vector<int> pred(n), lab(n), grp(n), swapped(n);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = u(rng) < 0.5;
      lab[i] = u(rng) < 0.5;
      grp[i] = i % 2;
      swapped[i] = 1 - grp[i];
      w[i] = 0.1 + u(rng);
    }
    pred[0] = pred[1] = 1;
    const double even[] = {0.5, 0.5};
    const auto f = f1_scores(GroupConfusion::tally(pred, lab, w, grp), even);
    f1_ok += f.weighted == f.macro;
    const double a = disparate_impact(pred, w, grp), b = disparate_impact(pred, w, swapped);
    di_ok += std::abs(a * b - 1.0) < 1e-12;
  }
  o.check(f1_ok == 200, fmt("f1 weighted equals macro at equal priors: %d/200", f1_ok));
  o.check(di_ok == 200, fmt("disparate impact reciprocity: %d/200", di_ok));
  o.summary = "property suites over randomized cases";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "prox oracle equivalence", 60, prox_oracle},
      {2, "feasibility fixture", 1, feasibility_fixture},
      {3, "two-point analytic instance", 1, analytic_instance},
      {4, "synthetic reproduction", 120, synthetic_reproduction},
      {5, "Dykstra and alternating scaling agreement", 30, dykstra_bregman},
      {6, "adult TV table regression", 60, table_one},
      {7, "adult directional study", 900, adult_directional},
      {8, "band root-finder contract", 5, root_finder},
      {9, "invariant suites", 60, invariants},
  };
  return all;
}

Status run(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.status = Status::fail;
    o.summary = std::string("threw: ") + e.what();
  }
  const double secs = seconds_since(t0);
  if (o.status != Status::skipped) {
    o.check(secs < c.budget_seconds,
            fmt("runtime %.2f s within the %.0f s budget", secs, c.budget_seconds));
  }
  const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIPPED";
  std::printf("criterion %d: %s  %s: %s\n", c.id, tag, c.name, o.summary.c_str());
  for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
  std::fflush(stdout);
  return o.status;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: otrepair_acceptance [criterion 1-9]\n");
    return 2;
  }
  if (argc == 2) {
    const int id = std::atoi(argv[1]);
    for (const auto& c : criteria()) {
      if (c.id != id) continue;
      const Status s = run(c);
      return s == Status::pass ? 0 : s == Status::skipped ? 77 : 1;
    }
    std::fprintf(stderr, "unknown criterion '%s'\n", argv[1]);
    return 2;
  }
  int failed = 0;
  for (const auto& c : criteria()) failed += run(c) == Status::fail;
  return failed == 0 ? 0 : 1;
}

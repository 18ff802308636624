// Command-line front end: solve, repair, barycentre, metrics, synthetic-exp, adult-exp.
// Exit codes: 0 success, 2 invalid input, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "otrepair/data_io.hpp"
#include "otrepair/disparity.hpp"
#include "otrepair/errors.hpp"
#include "otrepair/experiments.hpp"
#include "otrepair/metrics.hpp"
#include "otrepair/prox.hpp"
#include "otrepair/repair.hpp"
#include "otrepair/solver.hpp"
#include "otrepair/transport.hpp"

namespace fs = std::filesystem;
using namespace otrepair;

namespace {

struct SolveFlags {
  std::optional<double> epsilon;
  std::optional<int> iters;
  std::optional<std::string> theta;
  std::optional<std::string> config;
  std::vector<double> cost_weights;
};

void add_solve_flags(CLI::App* app, SolveFlags& f) {
  app->add_option("--epsilon", f.epsilon, "Entropic regularization weight");
  app->add_option("--iters", f.iters, "Number of prox steps K");
  app->add_option("--theta", f.theta, "Repair band: a number, 'zero' or 'none'");
  app->add_option("--config", f.config, "SolveConfig JSON; flags override it");
  app->add_option("--cost-weights", f.cost_weights,
                  "Per-feature cost weights g (default: 1 / feature range)")
      ->delimiter(',');
}

SolveConfig resolve_config(const SolveFlags& f, int default_iters) {
  SolveConfig c;
  c.max_iters = default_iters;
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw ValidationError("cannot open " + *f.config);
    try {
      c = nlohmann::json::parse(in).get<SolveConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("bad config " + *f.config + ": " + e.what());
    }
  }
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.iters) c.max_iters = *f.iters;
  if (f.theta) c.theta = ThetaSpec::parse(*f.theta);
  c.validate();
  return c;
}

std::vector<double> weights_for(const SolveFlags& f, const Support& s) {
  if (!f.cost_weights.empty()) {
    if (f.cost_weights.size() != s.dim()) {
      throw ValidationError("--cost-weights needs one value per feature");
    }
    return f.cost_weights;
  }
  std::vector<double> g;
  for (std::size_t k = 0; k < s.dim(); ++k) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < s.size(); ++i) {
      lo = std::min(lo, s.point(i)[k]);
      hi = std::max(hi, s.point(i)[k]);
    }
    g.push_back(hi > lo ? 1.0 / (hi - lo) : 1.0);
  }
  return g;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Group-blind repair of a dataset: estimates P^X and V from its own columns.
struct RepairInputs {
  WeightedDataset data;
  Histogram p_x;
  Histogram target;
  std::optional<DisparityVector> v;
};

RepairInputs prepare(const std::string& data_path, const std::optional<std::string>& schema_path,
                     const std::string& target_arg) {
  const DatasetSchema schema = schema_path ? load_schema(*schema_path) : DatasetSchema{};
  WeightedDataset data = load_dataset(data_path, schema);
  const SupportPtr support = build_support(data);
  Histogram p_x = empirical_distribution(data, support);
  Histogram target = target_arg == "self" ? p_x : read_histogram(target_arg);
  std::optional<DisparityVector> v;
  const bool grouped = std::all_of(data.samples.begin(), data.samples.end(),
                                   [](const auto& s) { return s.group.has_value(); });
  if (grouped) {
    const auto groups = groupwise_distributions(data);
    if (groups.size() == 2) {
      v = disparity_vector(groups.begin()->second.embed(support),
                           std::next(groups.begin())->second.embed(support), p_x);
    }
  }
  return {std::move(data), std::move(p_x), std::move(target), std::move(v)};
}

SolveResult run_solver(const Histogram& p_x, const Histogram& target,
                       const std::optional<DisparityVector>& v, const SolveConfig& config,
                       const CostMatrix& cost) {
  const Matrix xi = gibbs_kernel(cost, config.epsilon);
  const auto band = config.theta.band(target.support_ptr());
  SolveConfig c = config;
  c.cycle = {row_eq(p_x), col_eq(target)};
  if (band) {
    if (!v) throw ValidationError("a repair band needs two groups to compute the disparity vector");
    c.cycle.push_back(parity_band(*v, *band));
  }
  return dykstra(xi, c);
}

void print_report(const SolveReport& r) {
  std::printf("iterations=%d converged=%s kl=%.10g residuals=", r.iterations_run,
              r.converged ? "true" : "false", r.kl_to_kernel);
  for (std::size_t k = 0; k < r.final_residuals.size(); ++k) {
    std::printf("%s%.3e", k ? "," : "", r.final_residuals[k]);
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic optimal-transport repair for demographic parity"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  app.add_option("--out-dir", out_dir, "Directory for all outputs")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "Compute a coupling between two histograms");
  SolveFlags solve_flags;
  std::string solve_source, solve_target = "self";
  std::optional<std::string> solve_g0, solve_g1;
  solve->add_option("--source", solve_source, "Source histogram CSV (P^X)")->required();
  solve->add_option("--target", solve_target, "Target histogram CSV or 'self'");
  solve->add_option("--group0", solve_g0, "Group-0 conditional histogram CSV");
  solve->add_option("--group1", solve_g1, "Group-1 conditional histogram CSV");
  add_solve_flags(solve, solve_flags);

  // repair
  auto* repair = app.add_subcommand("repair", "Repair a dataset with a group-blind map");
  SolveFlags repair_flags;
  std::string repair_data, repair_target = "self";
  std::optional<std::string> repair_schema, repair_coupling;
  double min_weight = 0.0;
  repair->add_option("--data", repair_data, "Dataset CSV")->required();
  repair->add_option("--schema", repair_schema, "Dataset descriptor JSON");
  repair->add_option("--target", repair_target, "Target histogram CSV or 'self'");
  repair->add_option("--coupling", repair_coupling, "Use this coupling instead of solving");
  repair->add_option("--min-weight", min_weight, "Drop splits with weight at or below this");
  add_solve_flags(repair, repair_flags);

  // barycentre
  auto* bary = app.add_subcommand("barycentre", "Repair each group onto the barycentre");
  SolveFlags bary_flags;
  std::string bary_data;
  std::optional<std::string> bary_schema;
  bary->add_option("--data", bary_data, "Dataset CSV with a group column")->required();
  bary->add_option("--schema", bary_schema, "Dataset descriptor JSON");
  add_solve_flags(bary, bary_flags);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Fairness and accuracy report for a dataset");
  std::string metrics_data;
  std::optional<std::string> metrics_schema, metrics_scores;
  double f_th = 0.1;
  metrics->add_option("--data", metrics_data, "Dataset CSV")->required();
  metrics->add_option("--schema", metrics_schema, "Dataset descriptor JSON");
  metrics->add_option("--scores", metrics_scores, "Per-row classifier scores CSV");
  metrics->add_option("--f-th", f_th, "Score threshold")->capture_default_str();

  // synthetic-exp
  auto* syn = app.add_subcommand("synthetic-exp", "Discretized Gaussian study");
  std::optional<std::uint64_t> syn_seed;
  std::optional<std::string> syn_config;
  std::optional<double> syn_eps;
  std::optional<int> syn_iters;
  syn->add_option("--seed", syn_seed, "RNG seed");
  syn->add_option("--config", syn_config, "SyntheticConfig JSON");
  syn->add_option("--epsilon", syn_eps, "Entropic regularization weight");
  syn->add_option("--iters", syn_iters, "K for the repair arms");

  // adult-exp
  auto* adult = app.add_subcommand("adult-exp", "Adult census trade-off study");
  AdultConfig adult_cfg;
  std::string attribute = "race";
  std::optional<std::string> adult_scores;
  adult->add_option("--data-dir", adult_cfg.data_dir, "Directory with adult.data and adult.test")
      ->capture_default_str();
  adult->add_option("--attribute", attribute, "race or sex")
      ->check(CLI::IsMember({"race", "sex"}))
      ->capture_default_str();
  adult->add_option("--trials", adult_cfg.trials, "Number of random 60/40 splits")
      ->capture_default_str();
  adult->add_option("--seed", adult_cfg.seed, "Base seed; trial t uses seed + t");
  adult->add_option("--epsilon", adult_cfg.epsilon, "Entropic regularization weight");
  adult->add_option("--iters", adult_cfg.k_repair, "K for the repair arms");
  adult->add_option("--scores", adult_scores, "External score table CSV (features..., score)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path out(out_dir);
    fs::create_directories(out);

    if (*solve) {
      const SolveConfig config = resolve_config(solve_flags, kDefaultRepairIters);
      const Histogram p_x = read_histogram(solve_source);
      const Histogram target = solve_target == "self" ? p_x : read_histogram(solve_target);
      std::optional<DisparityVector> v;
      if (solve_g0 && solve_g1) {
        v = disparity_vector(read_histogram(*solve_g0), read_histogram(*solve_g1), p_x);
      }
      const CostMatrix cost =
          cost_matrix(p_x.support(), target.support(), weights_for(solve_flags, p_x.support()));
      const SolveResult r = run_solver(p_x, target, v, config, cost);
      write_histogram(out / "source.csv", p_x);
      write_histogram(out / "target.csv", target);
      write_coupling(out / "coupling.csv", r.coupling, "source.csv", "target.csv");
      write_json(out / "report.json", {{"config", config}, {"report", r.report}});
      print_report(r.report);
    } else if (*repair) {
      const SolveConfig config = resolve_config(repair_flags, kDefaultRepairIters);
      RepairInputs in = prepare(repair_data, repair_schema, repair_target);
      Matrix gamma;
      if (repair_coupling) {
        gamma = read_coupling(*repair_coupling);
      } else {
        const CostMatrix cost = cost_matrix(in.p_x.support(), in.target.support(),
                                            weights_for(repair_flags, in.p_x.support()));
        const SolveResult r = run_solver(in.p_x, in.target, in.v, config, cost);
        print_report(r.report);
        write_json(out / "report.json", {{"config", config}, {"report", r.report}});
        gamma = prox_row_eq(r.coupling, in.p_x.mass());
        write_histogram(out / "source.csv", in.p_x);
        write_histogram(out / "target.csv", in.target);
        write_coupling(out / "coupling.csv", r.coupling, "source.csv", "target.csv");
      }
      const ProjectionMap map = projection_map(gamma, in.p_x, in.target.support_ptr());
      const ApplyResult res = apply_map(in.data, map, min_weight);
      write_dataset(out / "repaired.csv", res.data);
      std::printf("samples_in=%zu samples_out=%zu dropped_weight=%.6g\n", in.data.samples.size(),
                  res.data.samples.size(), res.dropped_weight);
    } else if (*bary) {
      const SolveConfig config = resolve_config(bary_flags, kDefaultAffineIters);
      RepairInputs in = prepare(bary_data, bary_schema, "self");
      const auto groups = groupwise_distributions(in.data);
      if (groups.size() != 2) throw ValidationError("barycentre needs exactly two groups");
      const SupportPtr& s = in.p_x.support_ptr();
      const Histogram p0 = groups.begin()->second.embed(s);
      const Histogram p1 = std::next(groups.begin())->second.embed(s);
      const int g0 = groups.begin()->first;
      double w0 = 0.0;
      for (const auto& x : in.data.samples) w0 += *x.group == g0 ? x.weight : 0.0;
      const double pi0 = w0 / in.data.total_weight();
      const CostMatrix cost = cost_matrix(*s, *s, weights_for(bary_flags, *s));
      const SolveResult r = solve_barycentre_coupling(p0, p1, cost, config.epsilon,
                                                      config.max_iters, config.residual_tol);
      print_report(r.report);
      const GroupMaps maps = barycentre_group_maps(r.coupling, pi0, *s);
      WeightedDataset out_data;
      out_data.feature_names = in.data.feature_names;
      out_data.neutral_names = in.data.neutral_names;
      for (int k = 0; k < 2; ++k) {
        WeightedDataset part = in.data;
        const int gid = k == 0 ? g0 : std::next(groups.begin())->first;
        std::erase_if(part.samples, [&](const auto& x) { return *x.group != gid; });
        const ProjectionMap map =
            group_projection_map(k == 0 ? maps.to_barycentre_0 : maps.to_barycentre_1, s, s);
        const ApplyResult res = apply_map(part, map, 0.0);
        out_data.samples.insert(out_data.samples.end(), res.data.samples.begin(),
                                res.data.samples.end());
      }
      write_histogram(out / "support.csv", in.p_x);
      write_coupling(out / "barycentre_coupling.csv", r.coupling, "support.csv", "support.csv");
      write_dataset(out / "repaired.csv", out_data);
      write_json(out / "report.json", {{"pi0", pi0}, {"report", r.report}});
    } else if (*metrics) {
      const DatasetSchema schema = metrics_schema ? load_schema(*metrics_schema) : DatasetSchema{};
      const WeightedDataset data = load_dataset(metrics_data, schema);
      nlohmann::json j;
      j["s_wise_tv"] = s_wise_tv(data);
      if (metrics_scores) {
        const auto scores = load_row_scores(*metrics_scores, data.samples.size());
        std::vector<int> pred, labels, groups;
        std::vector<double> weights;
        double w0 = 0.0;
        for (std::size_t r = 0; r < data.samples.size(); ++r) {
          const auto& s = data.samples[r];
          if (!s.label || !s.group) throw ValidationError("metrics with scores need labels and groups");
          pred.push_back(scores[r] < f_th ? 0 : 1);
          labels.push_back(*s.label);
          groups.push_back(*s.group);
          weights.push_back(s.weight);
          if (*s.group == 0) w0 += s.weight;
        }
        const double total = data.total_weight();
        const std::vector<double> p_s{w0 / total, 1.0 - w0 / total};
        const F1Scores f1 = f1_scores(GroupConfusion::tally(pred, labels, weights, groups), p_s);
        MetricReport m;
        m.f1_micro = f1.micro;
        m.f1_macro = f1.macro;
        m.f1_weighted = f1.weighted;
        m.f1_warning = f1.zero_denominator;
        m.disparate_impact = disparate_impact(pred, weights, groups);
        m.s_wise_tv = j["s_wise_tv"].get<double>();
        j = m;
        std::ofstream(out / "metrics.csv") << MetricReport::csv_header() << '\n'
                                           << m.csv_row() << '\n';
      }
      write_json(out / "metrics.json", j);
      std::cout << j.dump() << '\n';
    } else if (*syn) {
      SyntheticConfig c;
      if (syn_config) {
        std::ifstream in(*syn_config);
        if (!in) throw ValidationError("cannot open " + *syn_config);
        try {
          c = nlohmann::json::parse(in).get<SyntheticConfig>();
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError("bad config: " + std::string(e.what()));
        }
      }
      if (syn_seed) c.seed = *syn_seed;
      if (syn_eps) c.epsilon = *syn_eps;
      if (syn_iters) c.k_repair = *syn_iters;
      const SyntheticResult r = synthetic_experiment(c);
      write_synthetic_outputs(out, r);
      std::printf("%-14s %10s %12s %10s\n", "arm", "s_wise_tv", "tv_to_target", "bound");
      for (const auto& a : r.arms) {
        std::printf("%-14s %10.6f %12.6f %10s\n", a.name.c_str(), a.s_wise_tv, a.tv_to_target,
                    a.bound ? std::to_string(a.bound->tv_bound).c_str() : "-");
      }
    } else if (*adult) {
      adult_cfg.attribute = attribute == "sex" ? AdultAttribute::sex : AdultAttribute::race;
      if (adult_scores) adult_cfg.scores = fs::path(*adult_scores);
      const AdultResult r = adult_experiment(adult_cfg);
      write_adult_outputs(out, r);
      std::printf("rows=%zu adjusted=", r.rows);
      for (const auto& a : r.selection.adjusted) std::printf("%s ", a.c_str());
      std::printf("\n%-12s %s\n", "arm", "mean f1_micro,f1_macro,f1_weighted,DI,s_wise_tv");
      for (const auto& s : r.summary) {
        std::printf("%-12s %s\n", s.arm.c_str(), s.mean.csv_row().c_str());
      }
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

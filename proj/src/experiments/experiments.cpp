#include "otrepair/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>

#include "otrepair/divergence.hpp"
#include "otrepair/errors.hpp"
#include "otrepair/prox.hpp"
#include "otrepair/repair.hpp"
#include "otrepair/transport.hpp"

namespace otrepair {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double normal_cdf(double x, double mean, double std) {
  return 0.5 * std::erfc(-(x - mean) / (std * std::sqrt(2.0)));
}

// Group-wise and group-blind histograms of a mapped dataset on `grid`.
struct Projected {
  Histogram group0;
  Histogram group1;
  Histogram blind;
};

Projected project_dataset(const WeightedDataset& mapped, const SupportPtr& grid) {
  std::vector<double> w0(grid->size(), 0.0), w1(grid->size(), 0.0);
  for (const auto& s : mapped.samples) {
    const auto j = grid->find(s.features);
    if (!j) throw ValidationError("mapped sample outside the target grid");
    (s.group == 0 ? w0 : w1)[*j] += s.weight;
  }
  std::vector<double> all(grid->size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = w0[j] + w1[j];
  return {make_histogram(grid, w0), make_histogram(grid, w1), make_histogram(grid, all)};
}

// The solvers stop after a fixed number of prox steps, which can leave the
// source marginal slightly off. Maps are read from the row projection of the
// final iterate so every sample keeps exactly its own weight.
Matrix row_feasible(const Matrix& gamma, const Histogram& p_x) {
  return prox_row_eq(gamma, p_x.mass());
}

}  // namespace

void to_json(nlohmann::json& j, const SyntheticConfig& c) {
  j = {{"seed", c.seed},           {"samples", c.samples},
       {"p_s0", c.p_s0},           {"mean0", c.mean0},
       {"std0", c.std0},           {"mean1", c.mean1},
       {"std1", c.std1},           {"target_mean", c.target_mean},
       {"target_std", c.target_std}, {"support_lo", c.support_lo},
       {"support_hi", c.support_hi}, {"epsilon", c.epsilon},
       {"cost_weight", c.cost_weight}, {"k_baseline", c.k_baseline},
       {"k_repair", c.k_repair},   {"theta_grid", c.theta_grid}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  c = SyntheticConfig{};
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("seed", c.seed);
  opt("samples", c.samples);
  opt("p_s0", c.p_s0);
  opt("mean0", c.mean0);
  opt("std0", c.std0);
  opt("mean1", c.mean1);
  opt("std1", c.std1);
  opt("target_mean", c.target_mean);
  opt("target_std", c.target_std);
  opt("support_lo", c.support_lo);
  opt("support_hi", c.support_hi);
  opt("epsilon", c.epsilon);
  opt("cost_weight", c.cost_weight);
  opt("k_baseline", c.k_baseline);
  opt("k_repair", c.k_repair);
  opt("theta_grid", c.theta_grid);
}

Histogram discretized_normal(const SupportPtr& grid, double mean, double std) {
  if (!(std > 0.0)) throw ValidationError("standard deviation must be positive");
  if (grid->dim() != 1) throw ValidationError("discretized_normal needs a 1-d grid");
  const std::size_t n = grid->size();
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = grid->point(i)[0];
    const double lo = i == 0 ? 0.0 : normal_cdf(k, mean, std);
    const double hi = i + 1 == n ? 1.0 : normal_cdf(k + 1.0, mean, std);
    m[i] = std::max(hi - lo, 0.0);
  }
  return make_histogram(grid, m);
}

WeightedDataset synthetic_samples(const SyntheticConfig& c) {
  if (!(c.p_s0 > 0.0 && c.p_s0 < 1.0)) throw ValidationError("p_s0 must lie in (0, 1)");
  if (c.samples < 1) throw ValidationError("sample count must be positive");
  if (c.support_hi <= c.support_lo) throw ValidationError("empty synthetic support");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> n0(c.mean0, c.std0), n1(c.mean1, c.std1);
  WeightedDataset data;
  data.feature_names = {"x"};
  data.samples.reserve(static_cast<std::size_t>(c.samples));
  const double lo = static_cast<double>(c.support_lo);
  const double hi = static_cast<double>(c.support_hi);
  for (int m = 0; m < c.samples; ++m) {
    const int group = coin(rng) < c.p_s0 ? 0 : 1;
    const double x = group == 0 ? n0(rng) : n1(rng);
    WeightedSample s;
    s.features = {std::clamp(std::floor(x), lo, hi)};
    s.group = group;
    s.origin = static_cast<std::size_t>(m);
    data.samples.push_back(std::move(s));
  }
  return data;
}

SyntheticResult synthetic_experiment(const SyntheticConfig& c) {
  const WeightedDataset data = synthetic_samples(c);
  const SupportPtr grid = make_support(Support::integer_grid(c.support_lo, c.support_hi));

  const Histogram full_px = empirical_distribution(data, grid);
  const auto groups = groupwise_distributions(data);
  if (groups.size() != 2) throw ValidationError("synthetic sample drew a single group");
  const std::vector<Histogram> conds{groups.at(0).embed(grid), groups.at(1).embed(grid)};
  const PrunedInputs pruned = prune_zero_mass(full_px, conds);
  const Histogram& p_x = pruned.p_x;
  const SupportPtr& source = p_x.support_ptr();
  const DisparityVector v = disparity_vector(pruned.conditionals[0], pruned.conditionals[1], p_x);

  const Histogram target = discretized_normal(grid, c.target_mean, c.target_std);
  const double g = c.cost_weight > 0.0
                       ? c.cost_weight
                       : 1.0 / static_cast<double>(c.support_hi - c.support_lo);
  const CostMatrix cost = cost_matrix(*source, *grid, std::vector<double>{g});

  SyntheticResult r{full_px, conds[0], conds[1], target, {v.values().begin(), v.values().end()},
                    {}};

  {
    SyntheticArm origin{"Origin", std::nullopt, conds[0], conds[1], full_px, 0.0, 0.0,
                        std::nullopt, {}, 0.0};
    origin.s_wise_tv = tv_distance(conds[0], conds[1]);
    origin.tv_to_target = tv_distance(full_px, target);
    r.arms.push_back(std::move(origin));
  }

  auto run_arm = [&](const std::string& name, std::optional<double> theta) {
    const auto t0 = Clock::now();
    SolveResult sol;
    std::optional<RepairBand> band;
    if (theta) {
      band = RepairBand::uniform(grid, *theta);
      sol = solve_repair_coupling(p_x, target, v, *band, cost, c.epsilon, c.k_repair);
    } else {
      sol = bregman_iterate(gibbs_kernel(cost, c.epsilon), p_x, target, c.k_baseline);
    }
    const ProjectionMap map = projection_map(row_feasible(sol.coupling, p_x), p_x, grid);
    const ApplyResult mapped = apply_map(data, map, 0.0);
    Projected proj = project_dataset(mapped.data, grid);
    SyntheticArm arm{name, theta, proj.group0, proj.group1, proj.blind, 0.0, 0.0,
                     std::nullopt, sol.report, 0.0};
    arm.s_wise_tv = tv_distance(proj.group0, proj.group1);
    arm.tv_to_target = tv_distance(proj.blind, target);
    if (band) arm.bound = theta_bound_check(sol.coupling, v, *band);
    arm.seconds = seconds_since(t0);
    r.arms.push_back(std::move(arm));
  };

  run_arm("Baseline", std::nullopt);
  for (double theta : c.theta_grid) {
    char name[48];
    if (theta == 0.0) {
      std::snprintf(name, sizeof name, "total-repair");
    } else {
      std::snprintf(name, sizeof name, "%g-repair", theta);
    }
    run_arm(name, theta);
  }
  return r;
}

void write_synthetic_outputs(const std::filesystem::path& dir, const SyntheticResult& r) {
  std::filesystem::create_directories(dir);
  write_histogram(dir / "p_x.csv", r.p_x);
  write_histogram(dir / "p_x_s0.csv", r.p_s0);
  write_histogram(dir / "p_x_s1.csv", r.p_s1);
  write_histogram(dir / "target.csv", r.target);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& a : r.arms) {
    const std::string stem = a.name;
    write_histogram(dir / (stem + "_s0.csv"), a.group0);
    write_histogram(dir / (stem + "_s1.csv"), a.group1);
    write_histogram(dir / (stem + "_blind.csv"), a.blind);
    nlohmann::json j = {{"arm", a.name},
                        {"s_wise_tv", a.s_wise_tv},
                        {"tv_to_target", a.tv_to_target},
                        {"seconds", a.seconds},
                        {"solver", a.report}};
    if (a.theta) j["theta"] = *a.theta;
    if (a.bound) {
      j["tv_bound"] = a.bound->tv_bound;
      j["achieved_tv"] = a.bound->achieved_tv;
      j["bound_holds"] = a.bound->holds;
    }
    summary.push_back(std::move(j));
  }
  std::ofstream(dir / "synthetic_summary.json") << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int repaired_prediction(std::span<const double> weights, std::span<const double> scores,
                        double f_th) {
  if (weights.empty()) throw ValidationError("repaired_prediction: no splits");
  if (weights.size() != scores.size()) {
    throw ValidationError("repaired_prediction: weights and scores differ in length");
  }
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    total += weights[k];
    mean += weights[k] * scores[k];
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("repaired_prediction: split weights sum to " + std::to_string(total));
  }
  return mean < f_th ? 0 : 1;
}

TreeEnsemble train_stub_classifier(const WeightedDataset& train, std::uint64_t seed) {
  if (train.empty()) throw ValidationError("classifier: empty training set");
  const std::size_t dim = train.samples.front().features.size() +
                          train.samples.front().neutral.size();
  std::vector<double> rows;
  std::vector<int> labels;
  rows.reserve(dim * train.samples.size());
  for (const auto& s : train.samples) {
    if (!s.label) throw ValidationError("classifier: training sample without a label");
    rows.insert(rows.end(), s.features.begin(), s.features.end());
    rows.insert(rows.end(), s.neutral.begin(), s.neutral.end());
    labels.push_back(*s.label);
  }
  TreeEnsemble::Options opt;
  opt.seed = seed;
  return TreeEnsemble::train(rows, dim, labels, opt);
}

namespace {

// Scores a test set pushed through per-group maps. Each sample's surviving
// splits are renormalized and fed to repaired_prediction.
class ArmEvaluator {
 public:
  ArmEvaluator(const WeightedDataset& test, std::vector<std::size_t> adjusted_pos,
               std::vector<std::size_t> neutral_pos, std::size_t full_dim,
               const std::function<double(std::span<const double>)>& scorer,
               const AdultConfig& config)
      : test_(test),
        adjusted_pos_(std::move(adjusted_pos)),
        neutral_pos_(std::move(neutral_pos)),
        full_dim_(full_dim),
        scorer_(scorer),
        config_(config),
        predictions_(test.samples.size(), -1) {}

  // Sends the samples for which `take` holds through `map`.
  template <class Pred>
  void run(const ProjectionMap& map, Pred take) {
    if (!hist0_) {
      hist0_.emplace(map.target->size(), 0.0);
      hist1_.emplace(map.target->size(), 0.0);
      target_ = map.target;
    }
    constexpr std::size_t kChunk = 256;
    WeightedDataset chunk;
    chunk.feature_names = test_.feature_names;
    chunk.neutral_names = test_.neutral_names;
    auto flush = [&] {
      if (chunk.samples.empty()) return;
      const ApplyResult out = apply_map(chunk, map, config_.min_weight);
      consume(out.data);
      chunk.samples.clear();
    };
    for (const auto& s : test_.samples) {
      if (!take(s)) continue;
      chunk.samples.push_back(s);
      if (chunk.samples.size() == kChunk) flush();
    }
    flush();
  }

  MetricReport report() const {
    std::vector<int> groups, labels;
    std::vector<double> weights;
    double n0 = 0.0;
    for (std::size_t r = 0; r < test_.samples.size(); ++r) {
      if (predictions_[r] < 0) throw SolverError("a test sample received no prediction");
      groups.push_back(*test_.samples[r].group);
      labels.push_back(*test_.samples[r].label);
      weights.push_back(test_.samples[r].weight);
      if (groups.back() == 0) n0 += weights.back();
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const std::vector<double> p_s{n0 / total, 1.0 - n0 / total};
    const auto conf = GroupConfusion::tally(predictions_, labels, weights, groups);
    const F1Scores f1 = f1_scores(conf, p_s);
    MetricReport m;
    m.f1_micro = f1.micro;
    m.f1_macro = f1.macro;
    m.f1_weighted = f1.weighted;
    m.f1_warning = f1.zero_denominator;
    m.disparate_impact = disparate_impact(predictions_, weights, groups);
    m.s_wise_tv = tv_distance(make_histogram(target_, *hist0_).mass(),
                              make_histogram(target_, *hist1_).mass());
    return m;
  }

 private:
  void consume(const WeightedDataset& mapped) {
    std::size_t k = 0;
    std::vector<double> full(full_dim_), w, sc;
    while (k < mapped.samples.size()) {
      const std::size_t origin = mapped.samples[k].origin;
      w.clear();
      sc.clear();
      for (; k < mapped.samples.size() && mapped.samples[k].origin == origin; ++k) {
        const auto& s = mapped.samples[k];
        for (std::size_t a = 0; a < adjusted_pos_.size(); ++a) full[adjusted_pos_[a]] = s.features[a];
        for (std::size_t a = 0; a < neutral_pos_.size(); ++a) full[neutral_pos_[a]] = s.neutral[a];
        w.push_back(s.weight);
        sc.push_back(scorer_(full));
        const auto j = target_->find(s.features);
        (*s.group == 0 ? *hist0_ : *hist1_)[*j] += s.weight;
      }
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& x : w) x /= total;
      predictions_[origin] = repaired_prediction(w, sc, config_.f_th);
    }
  }

  const WeightedDataset& test_;
  std::vector<std::size_t> adjusted_pos_;
  std::vector<std::size_t> neutral_pos_;
  std::size_t full_dim_;
  const std::function<double(std::span<const double>)>& scorer_;
  const AdultConfig& config_;
  std::vector<int> predictions_;
  std::optional<std::vector<double>> hist0_;
  std::optional<std::vector<double>> hist1_;
  SupportPtr target_;
};

MetricReport aggregate(const std::vector<MetricReport>& xs, bool stddev) {
  auto stat = [&](double MetricReport::*f) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const auto& x : xs) mean += x.*f;
    mean /= n;
    if (!stddev) return mean;
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (const auto& x : xs) ss += (x.*f - mean) * (x.*f - mean);
    return std::sqrt(ss / (n - 1.0));
  };
  MetricReport m;
  m.f1_micro = stat(&MetricReport::f1_micro);
  m.f1_macro = stat(&MetricReport::f1_macro);
  m.f1_weighted = stat(&MetricReport::f1_weighted);
  m.disparate_impact = stat(&MetricReport::disparate_impact);
  m.s_wise_tv = stat(&MetricReport::s_wise_tv);
  for (const auto& x : xs) m.f1_warning = m.f1_warning || x.f1_warning;
  return m;
}

}  // namespace

AdultResult adult_experiment(const AdultConfig& config) {
  if (config.trials < 1) throw ValidationError("trials must be at least 1");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0, 1)");
  }
  const AdultData adult = load_adult(config.data_dir, config.attribute);
  const WeightedDataset& full = adult.data;
  const auto& names = adult_numeric_features();

  AdultResult result;
  result.rows = full.samples.size();
  result.selection = feature_selection_by_tv(full, names, config.selection_threshold);
  const auto& adjusted = result.selection.adjusted;
  const auto& neutral = result.selection.neutral;
  if (adjusted.empty()) throw ValidationError("no feature exceeds the selection threshold");
  const std::vector<double> g = cost_weights_from_ranges(full, adjusted);

  std::vector<std::size_t> adjusted_pos, neutral_pos;
  for (const auto& a : adjusted) {
    adjusted_pos.push_back(static_cast<std::size_t>(
        std::find(names.begin(), names.end(), a) - names.begin()));
  }
  for (const auto& a : neutral) {
    neutral_pos.push_back(static_cast<std::size_t>(
        std::find(names.begin(), names.end(), a) - names.begin()));
  }

  std::optional<ScoreTable> external;
  if (config.scores) external = ScoreTable::load(*config.scores, names.size());

  std::vector<std::vector<MetricReport>> per_arm(adult_arm_names().size());
  std::vector<double> arm_seconds(adult_arm_names().size(), 0.0);

  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = config.seed + static_cast<std::uint64_t>(t);
    std::vector<std::size_t> order(full.samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(trial_seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::floor(config.train_fraction * static_cast<double>(order.size())));

    WeightedDataset train, test;
    train.feature_names = names;
    test.feature_names = adjusted;
    test.neutral_names = neutral;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const WeightedSample& s = full.samples[order[k]];
      if (k < n_train) {
        train.samples.push_back(s);
        continue;
      }
      WeightedSample x;
      for (auto p : adjusted_pos) x.features.push_back(s.features[p]);
      for (auto p : neutral_pos) x.neutral.push_back(s.features[p]);
      x.weight = s.weight;
      x.group = s.group;
      x.label = s.label;
      x.origin = test.samples.size();
      test.samples.push_back(std::move(x));
    }

    std::optional<TreeEnsemble> model;
    if (!external) model = train_stub_classifier(train, trial_seed);
    const std::function<double(std::span<const double>)> scorer =
        [&](std::span<const double> x) { return external ? external->score(x) : model->score(x); };

    const SupportPtr support = build_support(test);
    const Histogram p_x = empirical_distribution(test, support);
    const auto groups = groupwise_distributions(test);
    if (groups.size() != 2) throw ValidationError("test split lacks one of the groups");
    const Histogram p_s0 = groups.at(0).embed(support);
    const Histogram p_s1 = groups.at(1).embed(support);
    const DisparityVector v = disparity_vector(p_s0, p_s1, p_x);
    const CostMatrix cost = cost_matrix(*support, *support, g);
    const Matrix xi = gibbs_kernel(cost, config.epsilon);

    double n0 = 0.0;
    for (const auto& s : test.samples) n0 += *s.group == 0 ? s.weight : 0.0;
    const double pi0 = n0 / test.total_weight();

    auto everyone = [](const WeightedSample&) { return true; };
    std::vector<TrialResult> trial;
    auto finish = [&](std::size_t arm, const ArmEvaluator& ev, Clock::time_point t0) {
      TrialResult tr{adult_arm_names()[arm], ev.report(), seconds_since(t0)};
      per_arm[arm].push_back(tr.metrics);
      arm_seconds[arm] += tr.seconds;
      trial.push_back(std::move(tr));
    };

    {
      const auto t0 = Clock::now();
      Matrix identity(support->size(), support->size());
      for (std::size_t i = 0; i < support->size(); ++i) identity(i, i) = p_x[i];
      ArmEvaluator ev(test, adjusted_pos, neutral_pos, names.size(), scorer, config);
      ev.run(projection_map(identity, p_x, support), everyone);
      finish(0, ev, t0);
    }
    {
      const auto t0 = Clock::now();
      const SolveResult sol = bregman_iterate(xi, p_x, p_x, config.k_affine);
      ArmEvaluator ev(test, adjusted_pos, neutral_pos, names.size(), scorer, config);
      ev.run(projection_map(row_feasible(sol.coupling, p_x), p_x, support), everyone);
      finish(1, ev, t0);
    }
    {
      const auto t0 = Clock::now();
      const SolveResult sol = bregman_iterate(xi, p_s0, p_s1, config.k_affine);
      const GroupMaps maps = barycentre_group_maps(sol.coupling, pi0, *support);
      ArmEvaluator ev(test, adjusted_pos, neutral_pos, names.size(), scorer, config);
      ev.run(group_projection_map(maps.to_barycentre_0, support, support),
             [](const WeightedSample& s) { return *s.group == 0; });
      ev.run(group_projection_map(maps.to_barycentre_1, support, support),
             [](const WeightedSample& s) { return *s.group == 1; });
      finish(2, ev, t0);
    }
    const double thetas[] = {1e-2, 1e-3};
    for (std::size_t a = 0; a < 2; ++a) {
      const auto t0 = Clock::now();
      const RepairBand band = RepairBand::uniform(support, thetas[a]);
      SolveConfig sc;
      sc.epsilon = config.epsilon;
      sc.max_iters = config.k_repair;
      sc.cycle = {row_eq(p_x), col_eq(p_x), parity_band(v, band)};
      const SolveResult sol = dykstra(xi, sc);
      ArmEvaluator ev(test, adjusted_pos, neutral_pos, names.size(), scorer, config);
      ev.run(projection_map(row_feasible(sol.coupling, p_x), p_x, support), everyone);
      finish(3 + a, ev, t0);
    }
    result.trials.push_back(std::move(trial));
  }

  for (std::size_t a = 0; a < per_arm.size(); ++a) {
    result.summary.push_back({adult_arm_names()[a], aggregate(per_arm[a], false),
                              aggregate(per_arm[a], true),
                              arm_seconds[a] / static_cast<double>(config.trials)});
  }
  return result;
}

void write_adult_outputs(const std::filesystem::path& dir, const AdultResult& r) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "adult_trials.csv");
    csv << "trial,arm," << MetricReport::csv_header() << ",seconds\n";
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
      for (const auto& tr : r.trials[t]) {
        csv << t << ',' << tr.arm << ',' << tr.metrics.csv_row() << ',' << tr.seconds << '\n';
      }
    }
  }
  nlohmann::json j;
  j["rows"] = r.rows;
  j["adjusted"] = r.selection.adjusted;
  j["neutral"] = r.selection.neutral;
  j["feature_tv"] = r.selection.tv;
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& s : r.summary) {
    arms.push_back({{"arm", s.arm}, {"mean", s.mean}, {"std", s.stddev},
                    {"mean_seconds", s.mean_seconds}});
  }
  j["arms"] = arms;
  std::ofstream(dir / "adult_summary.json") << j.dump(2) << '\n';
}

}  // namespace otrepair

// Acceptance suite: one line per criterion, nonzero exit on any FAIL.
// REPORT lines record measured values that are compared against quoted
// ones without gating.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "auctk/cli.hpp"
#include "auctk/constraint.hpp"
#include "auctk/dataset.hpp"
#include "auctk/experiments.hpp"
#include "auctk/gradcheck.hpp"
#include "auctk/metrics.hpp"
#include "auctk/oracle.hpp"
#include "auctk/rng.hpp"
#include "auctk/train.hpp"
#include "json.hpp"

using namespace auctk;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void outcome(int criterion, bool ok, const std::string& what,
             const std::string& detail) {
  if (!ok) g_failures += 1;
  std::printf("%-4s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
}

void note(int criterion, const std::string& what, const std::string& detail) {
  std::printf("REPORT criterion %d (%s): %s\n", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- 1 & 5

std::vector<LayoutMatch> criterion_1_toy_oracle() {
  auto start = std::chrono::steady_clock::now();
  auto matches = enumerate_layouts();
  std::vector<LayoutMatch> full;
  for (const auto& m : matches)
    if (m.right && m.right->quad == Rational(19, 50)) full.push_back(m);
  double elapsed = seconds_since(start);

  bool ok = !matches.empty() && !full.empty() && elapsed < 1.0;
  std::string layouts;
  for (const auto& m : full)
    layouts += (layouts.empty() ? "" : ", ") + m.layout.str();
  outcome(1, ok, "toy-example oracle",
          fmt("%zu/252 layouts give the 39/50,3/25 left swap; %zu also give "
              "the 19/50 right-swap quadratic (%s); %.3f s",
              matches.size(), full.size(), layouts.c_str(), elapsed));
  for (const auto& m : full)
    note(1, "right-swap linear coefficient",
         fmt("measured %s vs 11/25 quoted (layout %s)",
             m.right->lin.str().c_str(), m.layout.str().c_str()));
  return full;
}

void criterion_5_asymmetry(const std::vector<LayoutMatch>& full) {
  bool ok = !full.empty();
  for (const auto& m : full) {
    AsymmetryReport r = asymmetry_demo(m.layout);
    ok = ok &&
         AsymmetryReport::strictly_prefers(r.per_positive_left,
                                           r.per_positive_right) &&
         AsymmetryReport::strictly_prefers(r.per_negative_right,
                                           r.per_negative_left) &&
         r.per_pair_left.lin == r.per_pair_right.lin;
  }
  outcome(5, ok, "asymmetry property",
          fmt("per-positive prefers left, per-negative prefers right, "
              "per-pair hinge mass identical, on %zu layout(s), all exact",
              full.size()));
}

// -------------------------------------------------------------------- 2

void criterion_2_gradients() {
  auto start = std::chrono::steady_clock::now();
  const LossKind kinds[] = {LossKind::bce,  LossKind::ce,    LossKind::wbce,
                            LossKind::cb_bce, LossKind::cb_ce, LossKind::s_fl,
                            LossKind::a_fl, LossKind::s_ml,  LossKind::a_ml,
                            LossKind::ldam, LossKind::mbauc};
  double worst = 0.0;
  std::string worst_name = "-";
  bool ok = true;
  for (LossKind kind : kinds) {
    GradCheck g = check_net_gradient(kind, 100, 7'000 + static_cast<int>(kind));
    ok = ok && g.pass() && g.trials >= 100;
    if (g.max_rel_err > worst) {
      worst = g.max_rel_err;
      worst_name = loss_kind_name(kind);
    }
  }
  GradCheck aug = check_augmented_binary(100, 7'100);
  GradCheck mc1 = check_multiclass_penalty(false, 100, 7'200);
  GradCheck mc2 = check_multiclass_penalty(true, 100, 7'300);
  ok = ok && aug.pass() && mc1.pass() && mc2.pass();
  for (const auto& [name, err] :
       std::map<std::string, double>{{"augmented", aug.max_rel_err},
                                     {"mc_v1", mc1.max_rel_err},
                                     {"mc_v2", mc2.max_rel_err}})
    if (err > worst) {
      worst = err;
      worst_name = name;
    }
  double elapsed = seconds_since(start);
  ok = ok && elapsed < 60.0;
  outcome(2, ok, "gradient correctness",
          fmt("11 losses + augmented loss + both multiclass penalties, 100 "
              "trials each; worst relative error %.3g (%s); %.1f s",
              worst, worst_name.c_str(), elapsed));
}

// -------------------------------------------------------------------- 3

void criterion_3_auc_equivalence() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> scores{rng.uniform(), rng.uniform()};
    std::vector<int> labels{1, 0};
    std::size_t extra = rng.below(60);
    for (std::size_t i = 0; i < extra; ++i) {
      double v = rng.uniform();
      if (rng.below(2) == 0) v = std::floor(v * 5.0) / 5.0;
      scores.push_back(v);
      labels.push_back(static_cast<int>(rng.below(2)));
    }
    double mw = auc_from_scores(scores, labels);
    double trap = auc_trapezoid(roc(scores, labels));
    worst = std::max(worst, std::abs(mw - trap));
  }
  double elapsed = seconds_since(start);
  outcome(3, worst <= 1e-12 && elapsed < 5.0, "auc estimator equivalence",
          fmt("max |mann-whitney - trapezoid| = %.3g over 1000 tied "
              "instances; %.2f s",
              worst, elapsed));
}

// -------------------------------------------------------------------- 4

void criterion_4_constraint_semantics() {
  Rng rng(404);
  double worst = 0.0;
  bool equivalence = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t p = 1 + rng.below(64);
    std::size_t n = 1 + rng.below(64);
    std::vector<double> pos(p), neg(n);
    for (double& v : pos) v = rng.uniform();
    for (double& v : neg) v = rng.uniform();
    // half the trials get a forced separation so both sides are exercised
    double delta = rng.uniform(0.0, 0.4);
    if (trial % 2 == 0)
      for (double& v : pos) v += 1.0 + delta;
    QVector fast = q_values(pos, neg, delta);
    QVector slow = q_values_bruteforce(pos, neg, delta);
    for (std::size_t j = 0; j < p; ++j)
      worst = std::max(worst, std::abs(fast.q[j] - slow.q[j]));
    bool all_zero = true;
    for (double v : fast.q) all_zero = all_zero && v == 0.0;
    double min_pos = *std::min_element(pos.begin(), pos.end());
    double max_neg = *std::max_element(neg.begin(), neg.end());
    equivalence = equivalence && (all_zero == (min_pos - max_neg >= delta));
  }
  outcome(4, worst <= 1e-12 && equivalence, "constraint semantics",
          fmt("q==0 iff min(pos)-max(neg)>=delta on 1000 instances; "
              "fast vs brute force max |diff| = %.3g",
              worst));
}

// -------------------------------------------------------------------- 6

void criterion_6_algorithm_mechanics() {
  Dataset pool = gen_gaussians({120, 40}, {{0.0, 0.0}, {1.2, 1.2}},
                               {{1.0, 1.0}, {1.0, 1.0}}, 606);
  auto split = stratified_splits(pool, 1, 0.75, 606).front();
  AlmConfig cfg;
  cfg.epochs = 12;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.4;
  cfg.mu0 = 1e-3;
  cfg.delta = 0.2;
  cfg.seed = 606;
  cfg.record_batches = true;
  Mlp init = Mlp::make({2, 8, 1}, HeadKind::sigmoid, 606);
  TrainResult run = train(init, split.train, split.validation, LossSpec{}, cfg);

  // lambda replay: exact running sum of mu * q over recorded batches
  std::map<long, double> replay;
  for (const BatchRecord& rec : run.batch_log)
    for (std::size_t j = 0; j < rec.ids.size(); ++j)
      replay[rec.ids[j]] += rec.mu * rec.q[j];
  bool lambda_ok = true;
  for (const auto& [id, value] : replay)
    lambda_ok = lambda_ok && run.state.lambda_for({1, id}) == value;
  for (const auto& [key, value] : run.state.lambda)
    lambda_ok = lambda_ok && replay.count(key.sample_id) == 1;

  // mu replay: grows exactly by rho, only on drops beyond the tolerance
  bool mu_ok = true;
  bool saw_growth = false;
  const auto& epochs = run.trace.epochs;
  for (std::size_t t = 1; t < epochs.size(); ++t) {
    bool dropped =
        t >= 2 && epochs[t - 1].val_metric <
                      epochs[t - 2].val_metric - cfg.val_tolerance;
    double expected = dropped ? epochs[t - 1].mu * cfg.rho : epochs[t - 1].mu;
    mu_ok = mu_ok && epochs[t].mu == expected;
    saw_growth = saw_growth || dropped;
  }

  // penalty off is bit-identical to a zeroed constraint
  AlmConfig none_cfg = cfg;
  none_cfg.penalty_mode = PenaltyMode::none;
  AlmConfig zero_cfg = cfg;
  zero_cfg.mu0 = 0.0;
  TrainResult none_run =
      train(init, split.train, split.validation, LossSpec{}, none_cfg);
  TrainResult zero_run =
      train(init, split.train, split.validation, LossSpec{}, zero_cfg);
  bool none_ok =
      none_run.model.flatten_parameters() == zero_run.model.flatten_parameters();

  outcome(6, lambda_ok && mu_ok && saw_growth && none_ok,
          "algorithm mechanics",
          fmt("lambda replay exact over %zu batch records; mu schedule "
              "replay exact (%s growth observed); penalty-off run "
              "bit-identical to mu0=0",
              run.batch_log.size(), saw_growth ? "with" : "WITHOUT"));
}

// -------------------------------------------------------------------- 7

struct SeedOutcome {
  double bce_fpr95 = 1.0, alm_fpr95 = 1.0;
  double bce_auc = 0.0, alm_auc = 0.0;
};

void criterion_7_end_to_end() {
  auto start = std::chrono::steady_clock::now();
  Dataset test = gen_gaussians({2000, 2000}, {{0.0, 0.0}, {1.5, 1.5}},
                               {{1.0, 1.0}, {1.0, 1.0}}, 10'000);

  // Protocol per seed: hyperparameters picked by mean validation AUC over
  // stratified splits, then BCE and ALM+BCE compared through the standard
  // 10-split logit-averaged ensembles on the held-out test set. The mu
  // schedule margin is sized to the validation noise of 9-positive splits.
  AlmConfig base;
  base.epochs = 40;
  base.batch_size = 64;
  base.learning_rate = 0.1;
  base.patience = 15;
  base.val_tolerance = 0.01;

  std::vector<SeedOutcome> outcomes(10);
  for (std::size_t s = 0; s < 10; ++s) {
    std::uint64_t seed = s + 1;
    Dataset pool = gen_gaussians({4500, 45}, {{0.0, 0.0}, {1.5, 1.5}},
                                 {{1.0, 1.0}, {1.0, 1.0}}, seed);
    auto splits = stratified_splits(pool, 3, 0.8, seed);

    RunContext ctx;
    ctx.hidden = {32, 32};
    ctx.base_seed = seed;
    ctx.threads = 2;

    AlmConfig bce_cfg = base;
    bce_cfg.penalty_mode = PenaltyMode::none;
    ExperimentResult bce_res =
        ensemble_run(pool, test, LossSpec{}, bce_cfg, 10, ctx);

    GridSpec grid = GridSpec::defaults_binary(100.0);
    GridResult gr = grid_search(splits, LossKind::bce, grid, base, ctx);
    ExperimentResult alm_res =
        ensemble_run(pool, test, gr.best.loss, gr.best.alm, 10, ctx);

    outcomes[s] = {bce_res.fpr_at_tpr.at("0.95"), alm_res.fpr_at_tpr.at("0.95"),
                   bce_res.ensembled_auc, alm_res.ensembled_auc};
  }

  int fpr_wins = 0, auc_holds = 0;
  for (const auto& o : outcomes) {
    if (o.alm_fpr95 < o.bce_fpr95) fpr_wins += 1;
    if (o.alm_auc >= o.bce_auc - 0.005) auc_holds += 1;
  }
  double elapsed = seconds_since(start);
  outcome(7, fpr_wins >= 7 && auc_holds >= 8 && elapsed < 600.0,
          "end-to-end synthetic benefit",
          fmt("ALM+BCE strictly lowers FPR@95%%TPR in %d/10 seeds; AUC "
              "within 0.005 of BCE in %d/10 seeds; %.0f s",
              fpr_wins, auc_holds, elapsed));
  for (std::size_t s = 0; s < outcomes.size(); ++s)
    note(7, fmt("seed %zu", s + 1),
         fmt("fpr@95: bce %.4f alm %.4f | auc: bce %.4f alm %.4f",
             outcomes[s].bce_fpr95, outcomes[s].alm_fpr95,
             outcomes[s].bce_auc, outcomes[s].alm_auc));
}

// -------------------------------------------------------------------- 8

void criterion_8_ranking_cost_comparator() {
  double worst_direct = 0.0, worst_root = 0.0;
  for (long m = 2; m <= 6; ++m)
    for (long n = m; n <= 6; ++n) {
      RankingScenario cfg;
      cfg.positives = m;
      cfg.negatives = n;
      worst_direct = std::max(
          worst_direct, std::abs(direct_cost(cfg).total - bruteforce_cost(cfg)));
      for (double dp : {0.5, 1.0, 2.0}) {
        RankingScenario c2 = cfg;
        c2.delta_p = dp;
        double root = equalizing_gap(c2);
        worst_root =
            std::max(worst_root, std::abs(positive_error_cost(c2, dp) -
                                          negative_error_cost(c2, dp + root)));
      }
    }
  outcome(8, worst_direct <= 1e-12 && worst_root <= 1e-9,
          "ranking-cost comparator",
          fmt("direct vs brute force max |diff| = %.3g over (M,N) in "
              "{2..6}^2; root substitution equalises to %.3g",
              worst_direct, worst_root));
  RankingScenario probe;
  note(8, "closed form vs direct",
       fmt("closed form %.4f vs direct %.4f at M=N=2 (difference is the "
           "misplaced-pair term)",
           closed_form_cost(probe).total, direct_cost(probe).total));
}

// -------------------------------------------------------------------- 9

void criterion_9_determinism() {
  fs::path dir = fs::temp_directory_path() /
                 ("auctk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  nlohmann::json cfg;
  cfg["task"] = "binary";
  cfg["seed"] = 17;
  cfg["dataset"]["gaussians"]["n_per_class"] = {80, 24};
  cfg["loss"]["kind"] = "bce";
  cfg["alm"]["epochs"] = 5;
  cfg["alm"]["batch_size"] = 16;
  cfg["alm"]["learning_rate"] = 0.1;
  cfg["alm"]["mu0"] = 1e-4;
  cfg["model"]["hidden"] = {8};
  cfg["out"] = (dir / "a").string();
  {
    std::ofstream out(dir / "config.json");
    out << cfg.dump();
  }
  bool ok =
      run_cli({"train", "--config", (dir / "config.json").string()}) == 0 &&
      run_cli({"train", "--config", (dir / "config.json").string(), "--out",
               (dir / "b").string()}) == 0;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const char* name : {"trace.csv", "checkpoint.json",
                           "constraint_state.json", "metrics.json"})
    ok = ok && slurp(dir / "a" / name) == slurp(dir / "b" / name) &&
         !slurp(dir / "a" / name).empty();

  // a second command family: grid with a singleton candidate set
  cfg["grid"]["mu0"] = {1e-4};
  cfg["grid"]["rho"] = {2.0};
  cfg["grid"]["delta"] = {0.1, 0.25};
  cfg["out"] = (dir / "ga").string();
  {
    std::ofstream out(dir / "grid.json");
    out << cfg.dump();
  }
  ok = ok &&
       run_cli({"grid", "--config", (dir / "grid.json").string()}) == 0 &&
       run_cli({"grid", "--config", (dir / "grid.json").string(), "--out",
                (dir / "gb").string()}) == 0;
  for (const char* name : {"leaderboard.csv", "best_config.json"})
    ok = ok && slurp(dir / "ga" / name) == slurp(dir / "gb" / name) &&
         !slurp(dir / "ga" / name).empty();
  fs::remove_all(dir);
  outcome(9, ok, "determinism",
          "repeated train and grid commands with one config produce "
          "byte-identical metric outputs");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  auto full = criterion_1_toy_oracle();
  criterion_2_gradients();
  criterion_3_auc_equivalence();
  criterion_4_constraint_semantics();
  criterion_5_asymmetry(full);
  criterion_6_algorithm_mechanics();
  criterion_7_end_to_end();
  criterion_8_ranking_cost_comparator();
  criterion_9_determinism();
  std::printf("================\n%s\n",
              g_failures == 0
                  ? "all acceptance criteria passed"
                  : fmt("%d acceptance criterion(s) FAILED", g_failures)
                        .c_str());
  return g_failures == 0 ? 0 : 1;
}

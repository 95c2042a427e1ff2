#include <cmath>

#include "auctk/experiments.hpp"
#include "auctk/metrics.hpp"
#include "doctest.h"

using namespace auctk;

namespace {

Dataset binary_task(std::size_t n0, std::size_t n1, std::uint64_t seed) {
  return gen_gaussians({n0, n1}, {{0.0, 0.0}, {1.5, 1.5}},
                       {{1.0, 1.0}, {1.0, 1.0}}, seed);
}

AlmConfig quick_base() {
  AlmConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.1;
  return cfg;
}

RunContext quick_ctx() {
  RunContext ctx;
  ctx.hidden = {6};
  ctx.base_seed = 3;
  ctx.threads = 2;
  return ctx;
}

}  // namespace

TEST_CASE("leaderboard selection is argmax with lexicographic tie-break") {
  std::vector<GridEntry> entries(4);
  entries[0].key = "b";
  entries[0].val_metric = 0.7;
  entries[1].key = "a";
  entries[1].val_metric = 0.9;
  entries[2].key = "c";
  entries[2].val_metric = 0.9;
  entries[3].key = "d";
  entries[3].val_metric = 0.2;
  CHECK(select_best(entries).key == "a");

  sort_leaderboard(entries);
  CHECK(entries[0].key == "a");
  CHECK(entries[1].key == "c");
  CHECK(entries[2].key == "b");
  CHECK(entries[3].key == "d");
  CHECK_THROWS_AS(select_best({}), std::invalid_argument);
}

TEST_CASE("config keys order deterministically and seed derivation is stable") {
  LossSpec loss;
  AlmConfig alm;
  std::string key = config_key(loss, alm);
  CHECK(key.find("loss=bce") == 0);
  RunContext ctx = quick_ctx();
  CHECK(config_seed(ctx, key, 0) == config_seed(ctx, key, 0));
  CHECK(config_seed(ctx, key, 0) != config_seed(ctx, key, 1));
  alm.mu0 *= 2.0;
  CHECK(config_seed(ctx, config_key(loss, alm), 0) !=
        config_seed(ctx, key, 0));
}

TEST_CASE("singleton grid returns that configuration") {
  Dataset pool = binary_task(60, 20, 5);
  auto split = stratified_splits(pool, 1, 0.75, 5).front();
  GridSpec grid;
  grid.mu0 = {1e-4};
  grid.rho = {2.0};
  grid.delta = {0.25};
  GridResult r = grid_search(split.train, split.validation, LossKind::bce,
                             grid, quick_base(), quick_ctx());
  CHECK(r.best.alm.mu0 == 1e-4);
  CHECK(r.best.alm.rho == 2.0);
  CHECK(r.best.alm.delta == 0.25);
  CHECK(r.best.loss.kind == LossKind::bce);
  // stage 1 baseline + one alm run
  CHECK(r.leaderboard.size() == 2);
  CHECK(!r.budget_exhausted);
}

TEST_CASE("a zero-mu candidate reproduces the unconstrained baseline") {
  Dataset pool = binary_task(60, 20, 6);
  auto split = stratified_splits(pool, 1, 0.75, 6).front();
  GridSpec grid;
  grid.mu0 = {0.0};
  grid.rho = {2.0};
  grid.delta = {0.1};
  GridResult r = grid_search(split.train, split.validation, LossKind::bce,
                             grid, quick_base(), quick_ctx());
  double baseline = -1.0, constrained = -2.0;
  for (const auto& e : r.leaderboard) {
    if (e.stage == 1) baseline = e.val_metric;
    if (e.stage == 2) constrained = e.val_metric;
  }
  CHECK(baseline >= 0.0);
  CHECK(constrained == baseline);
}

TEST_CASE("budget exhaustion flags a partial leaderboard") {
  Dataset pool = binary_task(60, 20, 7);
  auto split = stratified_splits(pool, 1, 0.75, 7).front();
  GridSpec grid;  // full default grid would need 1 + 10 + 3 runs
  GridResult r = grid_search(split.train, split.validation, LossKind::bce,
                             grid, quick_base(), quick_ctx(), 4);
  CHECK(r.budget_exhausted);
  CHECK(r.leaderboard.size() == 4);
}

TEST_CASE("ensemble run") {
  Dataset pool = binary_task(80, 30, 8);
  Dataset test = binary_task(120, 120, 9);
  LossSpec loss;
  AlmConfig alm = quick_base();
  alm.penalty_mode = PenaltyMode::none;

  SUBCASE("aggregates per-split and ensembled metrics") {
    ExperimentResult r = ensemble_run(pool, test, loss, alm, 4, quick_ctx());
    CHECK(r.split_metrics.size() == 4);
    CHECK(r.ensembled_auc > 0.5);
    CHECK(r.avg_metric == doctest::Approx(
        (r.split_metrics[0] + r.split_metrics[1] + r.split_metrics[2] +
         r.split_metrics[3]) / 4.0));
    CHECK(r.fpr_at_tpr.count("0.98"));
    CHECK(r.fpr_at_tpr.count("0.90"));
    std::string json = r.to_json();
    CHECK(json.find("avg_metric") != std::string::npos);
    CHECK(json.find("ensembled_auc") != std::string::npos);
  }
  SUBCASE("k = 1 degenerates to a single train and evaluate") {
    ExperimentResult r = ensemble_run(pool, test, loss, alm, 1, quick_ctx());
    CHECK(r.split_metrics.size() == 1);
    // a single model's ensembled score is a monotone transform of its logit
    CHECK(r.ensembled_auc == doctest::Approx(r.split_metrics[0]).epsilon(1e-12));
    CHECK(r.std_metric == 0.0);
  }
  SUBCASE("parallel and serial execution produce identical results") {
    RunContext serial = quick_ctx();
    serial.threads = 1;
    RunContext parallel = quick_ctx();
    parallel.threads = 4;
    ExperimentResult a = ensemble_run(pool, test, loss, alm, 4, serial);
    ExperimentResult b = ensemble_run(pool, test, loss, alm, 4, parallel);
    CHECK(a.to_json() == b.to_json());
  }
}

TEST_CASE("improvement correlation") {
  SUBCASE("constructed anticorrelation hits -1") {
    // improvement = -(baseline - 0.8) exactly
    std::vector<double> baseline{0.70, 0.75, 0.85, 0.90};
    std::vector<double> treated;
    for (double b : baseline) treated.push_back(b - (b - 0.8));
    CHECK(improvement_correlation(baseline, treated) ==
          doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("identical improvements are a zero-variance error") {
    // exactly representable values so the improvements are bit-equal
    std::vector<double> baseline{0.25, 0.5, 0.75};
    std::vector<double> treated{0.375, 0.625, 0.875};
    CHECK_THROWS_AS(improvement_correlation(baseline, treated),
                    std::invalid_argument);
  }
  SUBCASE("random pairs match the direct formula") {
    std::vector<double> baseline{0.61, 0.72, 0.83, 0.77, 0.69};
    std::vector<double> treated{0.71, 0.74, 0.81, 0.88, 0.80};
    std::vector<double> improvement;
    for (std::size_t i = 0; i < baseline.size(); ++i)
      improvement.push_back(treated[i] - baseline[i]);
    CHECK(improvement_correlation(baseline, treated) ==
          doctest::Approx(pearson(baseline, improvement)).epsilon(1e-12));
  }
}

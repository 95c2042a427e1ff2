#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "auctk/dataset.hpp"
#include "auctk/losses.hpp"
#include "auctk/train.hpp"

namespace auctk {

// Candidate sets for the staged hyperparameter search: loss-specific
// parameters first, then (mu0, rho), then delta.
struct GridSpec {
  std::vector<double> mu0{1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  std::vector<double> rho{2.0, 3.0};
  std::vector<double> delta{0.1, 0.25, 0.5, 1.0};
  std::vector<double> margin_m{0.5, 2.0, 4.0};
  std::vector<double> gamma{0.5, 1.0, 2.0};
  std::vector<double> w;  // resolved from the class ratio: {N/3, 2N/3, N}
  std::vector<double> beta{0.99, 0.999, 0.9999};
  std::vector<double> ldam_s{0.3, 0.5};
  std::vector<double> mbauc_margin{0.1, 1.0};

  static GridSpec defaults_binary(double class_ratio);
  static GridSpec defaults_multiclass(double class_ratio);
  void validate() const;
};

// How to build and seed one training run.
struct RunContext {
  std::vector<std::size_t> hidden{32, 32};
  bool binary = true;
  std::uint64_t base_seed = 1;
  int threads = 1;
};

std::uint64_t config_seed(const RunContext& ctx, const std::string& config_key,
                          std::uint64_t split_index);

std::string config_key(const LossSpec& loss, const AlmConfig& alm);

// The loss-only part of the key. Run seeds hash this rather than the full
// config so that penalty settings never change the starting point: a
// mu0=0 run is then trajectory-identical to its unconstrained baseline.
std::string loss_key(const LossSpec& loss);

struct GridEntry {
  LossSpec loss;
  AlmConfig alm;
  double val_metric = 0.0;  // mean over the selection splits
  int stage = 0;
  std::string key;
};

struct GridResult {
  std::vector<GridEntry> leaderboard;  // metric desc, then key asc
  GridEntry best;
  bool budget_exhausted = false;

  std::string leaderboard_csv() const;
};

// Pure selection rule, exposed for testing: highest metric wins, ties go to
// the lexicographically smallest key.
const GridEntry& select_best(const std::vector<GridEntry>& entries);

void sort_leaderboard(std::vector<GridEntry>& entries);

// Staged search over train+validation handles; test data is never passed
// in. Each candidate trains once per split and is scored by its mean
// validation metric. `budget` caps the number of training runs
// (0 = unlimited).
GridResult grid_search(const std::vector<SplitPair>& splits, LossKind kind,
                       const GridSpec& grid, const AlmConfig& base,
                       const RunContext& ctx, int budget = 0);

// Single-split convenience form.
GridResult grid_search(const Dataset& train, const Dataset& validation,
                       LossKind kind, const GridSpec& grid,
                       const AlmConfig& base, const RunContext& ctx,
                       int budget = 0);

struct ExperimentResult {
  std::string key;
  LossSpec loss;
  AlmConfig alm;
  int k = 0;
  bool binary = true;
  std::vector<double> split_metrics;  // per-model test AUC / accuracy
  double avg_metric = 0.0;
  double std_metric = 0.0;
  double ensembled_auc = 0.0;
  std::map<std::string, double> fpr_at_tpr;    // binary columns
  double ensembled_accuracy = 0.0;
  std::map<std::string, double> error_at_tpr;  // multi-class columns
  double overall_error_threshold = 0.0;

  std::string to_json() const;
};

// Train k models on k stratified splits and average test predictions in
// logit space before the sigmoid/softmax.
ExperimentResult ensemble_run(const Dataset& train_pool, const Dataset& test,
                              const LossSpec& loss, const AlmConfig& alm,
                              int k, const RunContext& ctx);

// pearson(baseline, improvement) over (baseline, treated) metric pairs.
double improvement_correlation(const std::vector<double>& baseline,
                               const std::vector<double>& treated);

// Deterministic parallel map: results land by index regardless of the
// execution order.
void run_parallel(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

extern const std::vector<double> kBinaryTprLevels;      // 0.98 0.95 0.92 0.90
extern const std::vector<double> kMulticlassTprLevels;  // 0.80 0.90

}  // namespace auctk

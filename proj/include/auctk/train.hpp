#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auctk/constraint.hpp"
#include "auctk/dataset.hpp"
#include "auctk/losses.hpp"
#include "auctk/mlp.hpp"

namespace auctk {

enum class PenaltyMode { alm, quadratic_only, lagrangian_only, none };
enum class ValMetric { auto_select, auc, accuracy };
enum class OptimizerKind { sgd, adam };
enum class StratifiedBatching { automatic, on, off };

struct AlmConfig {
  double mu0 = 1e-5;
  double rho = 2.0;
  double delta = 0.1;
  ValMetric val_metric = ValMetric::auto_select;
  double val_tolerance = 1e-4;
  PenaltyMode penalty_mode = PenaltyMode::alm;
  int epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::sgd;
  StratifiedBatching stratified = StratifiedBatching::automatic;
  int patience = 20;
  int mc_variant = 1;               // multi-class constraint: 1 or 2
  bool constraint_on_logits = false;  // binary: hinge on pre-sigmoid scores
  bool record_batches = false;        // per-batch log for replay checks

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double val_metric = 0.0;
  double mu = 0.0;  // value in effect during this epoch
  double mean_q = 0.0;
  double max_q = 0.0;
  double mean_lambda = 0.0;
  double loss_f = 0.0;
  double loss_quad = 0.0;
  double loss_lin = 0.0;
};

struct TrainingTrace {
  std::vector<EpochStats> epochs;
  std::string to_csv() const;
};

// One entry per (batch, critical class) where a lambda update fired.
struct BatchRecord {
  int epoch = 0;
  std::size_t batch_index = 0;
  int critical_class = 1;
  double mu = 0.0;
  std::vector<long> ids;
  std::vector<double> q;
};

struct TrainResult {
  Mlp model;  // best-validation checkpoint
  ConstraintState state;
  TrainingTrace trace;
  bool diverged = false;
  int best_epoch = 0;
  double best_metric = 0.0;
  std::vector<BatchRecord> batch_log;
};

// mu' = mu * rho iff the metric worsened by more than the tolerance.
double mu_update(double mu, double rho, double current_metric,
                 double previous_metric, double tolerance);

// Penalty value under an ablation mode, from the shared q/lambda/mu terms.
double penalty_for_mode(PenaltyMode mode, const PenaltyTerms& terms);

// The Algorithm-1 loop: per batch, descend theta on F + penalty and raise
// lambda by mu*q; per epoch, grow mu when the validation metric stalls.
TrainResult train(const Mlp& initial, const Dataset& train_data,
                  const Dataset& val_data, const LossSpec& loss,
                  const AlmConfig& config);

// Scores the model on a dataset: binary probability column or logit matrix.
Matrix model_outputs(const Mlp& model, const Dataset& data);

double validation_metric(const Mlp& model, const Dataset& data,
                         ValMetric metric);

}  // namespace auctk

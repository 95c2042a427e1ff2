#pragma once

#include <string>
#include <vector>

#include "auctk/matrix.hpp"

namespace auctk {

enum class LossKind {
  bce,     // binary cross-entropy on probabilities
  ce,      // softmax cross-entropy on logits
  wbce,    // bce with the positive-class term weighted by w
  cb_bce,  // class-balanced bce, weights (1-beta)/(1-beta^n_c)
  cb_ce,   // class-balanced softmax cross-entropy
  s_fl,    // symmetric focal, both classes modulated by (1-p_t)^gamma
  a_fl,    // focal on the majority class, logit margin m on the minority
  s_ml,    // logit margin m on the true class, both classes
  a_ml,    // logit margin m on minority-class samples only
  ldam,    // per-class margin s / n_c^(1/4) on the true-class logit
  mbauc    // in-batch squared-hinge pairwise AUC surrogate
};

struct LossSpec {
  LossKind kind = LossKind::bce;
  double w = 1.0;       // wbce
  double beta = 0.999;  // cb_bce / cb_ce
  double gamma = 1.0;   // s_fl / a_fl
  double m = 0.5;       // a_fl / s_ml / a_ml
  double s = 0.5;       // ldam
  double margin = 0.1;  // mbauc
  std::vector<long> class_counts;

  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  Matrix grad;           // dLoss/dOutput, same shape as outputs
  bool skipped = false;  // mbauc batch without both classes
};

bool is_multiclass_loss(LossKind kind);
std::string loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

// Mean batch loss and its gradient w.r.t. the model outputs. Binary kinds
// expect one probability column and labels in {0,1}; multi-class kinds
// expect one logit column per class.
LossResult loss_and_gradient(const LossSpec& spec, const Matrix& outputs,
                             const std::vector<int>& labels);

// Mean over in-batch positive-negative pairs of max(0, margin-(f_p-f_n))^2.
// Returns 0 and sets `skipped` when a class is missing from the batch.
LossResult mbauc_loss(const Matrix& outputs, const std::vector<int>& labels,
                      double margin);

// Class-balanced weights (1-beta)/(1-beta^n_c), rescaled to sum to the
// number of classes.
std::vector<double> class_balanced_weights(const std::vector<long>& counts,
                                           double beta);

std::vector<double> softmax_row(const double* logits, std::size_t n);

}  // namespace auctk

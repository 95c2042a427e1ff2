#pragma once

#include <string>
#include <vector>

#include "auctk/matrix.hpp"

namespace auctk {

struct RocPoint {
  double threshold;
  double tpr;
  double fpr;
};

// Operating points sorted by threshold descending, ties grouped, with the
// (0,0) and (1,1) endpoints always present. Predicted positive means
// score >= threshold.
struct RocCurve {
  std::vector<RocPoint> points;

  std::string to_csv() const;
};

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

// Mann-Whitney statistic: P(pos > neg) + 0.5 P(pos = neg) over all pairs.
double auc_mann_whitney(const std::vector<double>& pos_scores,
                        const std::vector<double>& neg_scores);

double auc_from_scores(const std::vector<double>& scores,
                       const std::vector<int>& labels);

// Trapezoidal area under the curve; agrees with Mann-Whitney on the same
// data when ties are grouped.
double auc_trapezoid(const RocCurve& curve);

// Minimum achievable FPR among operating points with tpr >= target.
double fpr_at_tpr(const RocCurve& curve, double target_tpr);

struct ThresholdedError {
  double error = 0.0;      // misclassification rate over non-critical samples
  double threshold = 0.0;  // critical-class logit threshold
};

// Threshold the critical class' logit to reach the target TPR on critical
// samples (ties to critical); remaining samples take the argmax over the
// non-critical logits. Error is measured on the non-critical samples.
ThresholdedError multiclass_error_at_tpr(const Matrix& logits,
                                         const std::vector<int>& labels,
                                         int critical_class,
                                         double target_tpr);

double accuracy(const Matrix& logits, const std::vector<int>& labels);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Elementwise mean of per-model logits; the ensemble probability is the
// sigmoid/softmax of the mean.
Matrix ensemble_logits(const std::vector<Matrix>& per_model_logits);

}  // namespace auctk

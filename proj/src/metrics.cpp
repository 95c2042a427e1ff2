#include "auctk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace auctk {

std::string RocCurve::to_csv() const {
  std::string out = "threshold,tpr,fpr\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", p.threshold, p.tpr,
                  p.fpr);
    out += buf;
  }
  return out;
}

RocCurve roc(const std::vector<double>& scores,
             const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores/labels length mismatch");
  std::size_t pos = 0, neg = 0;
  for (int y : labels) (y == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc needs both classes present");

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    double s = scores[order[i]];
    // group ties: one operating point per distinct score
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    curve.points.push_back({s, static_cast<double>(tp) / pos,
                            static_cast<double>(fp) / neg});
  }
  return curve;
}

double auc_mann_whitney(const std::vector<double>& pos_scores,
                        const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::invalid_argument("auc needs both classes present");
  // rank-based: O((P+N) log(P+N)) rather than the O(PN) pair count
  std::vector<double> sorted_neg = neg_scores;
  std::sort(sorted_neg.begin(), sorted_neg.end());
  double wins = 0.0;
  for (double p : pos_scores) {
    auto lo = std::lower_bound(sorted_neg.begin(), sorted_neg.end(), p);
    auto hi = std::upper_bound(lo, sorted_neg.end(), p);
    wins += static_cast<double>(lo - sorted_neg.begin());
    wins += 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(pos_scores.size()) *
                 static_cast<double>(neg_scores.size()));
}

double auc_from_scores(const std::vector<double>& scores,
                       const std::vector<int>& labels) {
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(scores[i]);
  return auc_mann_whitney(pos, neg);
}

double auc_trapezoid(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  return area;
}

double fpr_at_tpr(const RocCurve& curve, double target_tpr) {
  if (!(target_tpr > 0.0 && target_tpr <= 1.0))
    throw std::invalid_argument("target tpr must be in (0,1]");
  // tpr and fpr are both non-decreasing along the curve, so the first
  // point reaching the target has the minimum fpr among them
  for (const auto& p : curve.points)
    if (p.tpr >= target_tpr) return p.fpr;
  return 1.0;
}

ThresholdedError multiclass_error_at_tpr(const Matrix& logits,
                                         const std::vector<int>& labels,
                                         int critical_class,
                                         double target_tpr) {
  if (logits.rows() != labels.size())
    throw std::invalid_argument("logits/labels length mismatch");
  if (critical_class < 0 ||
      static_cast<std::size_t>(critical_class) >= logits.cols())
    throw std::invalid_argument("critical class out of range");
  if (!(target_tpr >= 0.0 && target_tpr <= 1.0))
    throw std::invalid_argument("target tpr must be in [0,1]");

  std::vector<double> crit_logits;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == critical_class)
      crit_logits.push_back(logits(i, static_cast<std::size_t>(critical_class)));
  if (crit_logits.empty())
    throw std::invalid_argument("no critical-class samples");

  // smallest admitted count reaching the target, threshold at that logit
  std::size_t need = static_cast<std::size_t>(
      std::ceil(target_tpr * static_cast<double>(crit_logits.size()) - 1e-12));
  ThresholdedError out;
  if (need == 0) {
    out.threshold = std::numeric_limits<double>::infinity();
  } else {
    std::sort(crit_logits.begin(), crit_logits.end(), std::greater<double>());
    out.threshold = crit_logits[need - 1];
  }

  std::size_t noncrit = 0, wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == critical_class) continue;
    noncrit += 1;
    if (logits(i, static_cast<std::size_t>(critical_class)) >= out.threshold) {
      wrong += 1;  // pulled into the critical class
      continue;
    }
    int best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      if (static_cast<int>(c) == critical_class) continue;
      if (logits(i, c) > best_v) {
        best_v = logits(i, c);
        best = static_cast<int>(c);
      }
    }
    if (best != labels[i]) wrong += 1;
  }
  out.error = noncrit == 0
                  ? 0.0
                  : static_cast<double>(wrong) / static_cast<double>(noncrit);
  return out;
}

double accuracy(const Matrix& logits, const std::vector<int>& labels) {
  if (logits.rows() != labels.size())
    throw std::invalid_argument("logits/labels length mismatch");
  if (labels.empty()) throw std::invalid_argument("empty batch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (logits.cols() == 1) {
      // binary sigmoid head: a single probability column
      int pred = logits(i, 0) >= 0.5 ? 1 : 0;
      if (pred == labels[i]) correct += 1;
      continue;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    if (static_cast<int>(best) == labels[i]) correct += 1;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson is undefined for zero variance");
  return sxy / std::sqrt(sxx * syy);
}

Matrix ensemble_logits(const std::vector<Matrix>& per_model_logits) {
  if (per_model_logits.empty())
    throw std::invalid_argument("ensemble needs at least one model");
  Matrix mean = per_model_logits.front();
  for (std::size_t m = 1; m < per_model_logits.size(); ++m) {
    if (!per_model_logits[m].same_shape(mean))
      throw std::invalid_argument("ensemble logit shape mismatch");
    for (std::size_t i = 0; i < mean.data().size(); ++i)
      mean.data()[i] += per_model_logits[m].data()[i];
  }
  const double inv = 1.0 / static_cast<double>(per_model_logits.size());
  for (double& v : mean.data()) v *= inv;
  return mean;
}

}  // namespace auctk

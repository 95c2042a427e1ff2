#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "auctk/matrix.hpp"

namespace auctk {

// One Lagrange multiplier per (critical class, training sample). Binary
// problems use the positive class id as the class component.
struct LambdaKey {
  int cls = 1;
  long sample_id = 0;
  auto operator<=>(const LambdaKey&) const = default;
};

// Dual state of the augmented-Lagrangian constraint: multipliers start at
// zero and only grow; mu only grows, by factor rho.
struct ConstraintState {
  std::map<LambdaKey, double> lambda;
  double mu = 1e-5;
  double rho = 2.0;
  double delta = 0.1;

  double lambda_for(const LambdaKey& key) const {
    auto it = lambda.find(key);
    return it == lambda.end() ? 0.0 : it->second;
  }
  double mean_lambda() const;

  std::string to_json() const;
  static ConstraintState from_json(const std::string& text);
};

// Aggregate hinge violation per positive sample:
// q_j = sum_k max(0, n_k - p_j + delta).
struct QVector {
  std::vector<long> ids;
  std::vector<double> q;
  std::vector<std::size_t> violations;  // strict-violation counts per positive

  double sum() const;
  double sum_sq() const;
  double max() const { double m = 0; for (double v : q) m = v > m ? v : m; return m; }
};

// Fast path: sort negatives once, then one binary search per positive,
// O((P+N) log N). Equals the brute-force double sum to rounding.
QVector q_values(const std::vector<double>& pos_scores,
                 const std::vector<double>& neg_scores, double delta,
                 const std::vector<long>* ids = nullptr);

// Reference O(P*N) evaluation, kept as the oracle for the fast path.
QVector q_values_bruteforce(const std::vector<double>& pos_scores,
                            const std::vector<double>& neg_scores,
                            double delta,
                            const std::vector<long>* ids = nullptr);

struct PenaltyTerms {
  double quadratic = 0.0;  // mu * sum q^2 / (2 |p| |n|)
  double linear = 0.0;     // sum lambda_j q_j / (|p| |n|)
  double total() const { return quadratic + linear; }
};

PenaltyTerms penalty_terms(const QVector& q, const ConstraintState& state,
                           std::size_t p_count, std::size_t n_count,
                           int critical_class = 1);

struct PenaltyGradient {
  std::vector<double> dpos;
  std::vector<double> dneg;
};

// d/dp_j = -(mu q_j + lambda_j) V_j / (|p||n|),
// d/dn_k = sum over violating j of (mu q_j + lambda_j) / (|p||n|).
PenaltyGradient penalty_gradient(const std::vector<double>& pos_scores,
                                 const std::vector<double>& neg_scores,
                                 const ConstraintState& state, double delta,
                                 const std::vector<long>* ids = nullptr,
                                 int critical_class = 1);

// lambda_j += mu * q_j for exactly the samples in q.
void apply_lambda_update(ConstraintState& state, const QVector& q,
                         int critical_class = 1);

// Multi-class constraints. `scores` holds one column per class (the training
// loop feeds softmax probabilities); `critical` is a non-empty strict subset
// of the classes.
struct MulticlassQ {
  int critical_class = 0;
  QVector q;
  std::size_t p_count = 0;  // critical-class samples in the batch
  std::size_t n_count = 0;  // non-critical samples in the batch
};

// Hinge of the critical-class score between each critical sample and every
// non-critical sample. `ids` maps rows to stable sample ids (rows by default).
std::vector<MulticlassQ> multiclass_q_v1(const Matrix& scores,
                                         const std::vector<int>& labels,
                                         const std::set<int>& critical,
                                         double delta,
                                         const std::vector<long>* ids = nullptr);

// v1 plus the reverse hinge on each non-critical class' own score.
std::vector<MulticlassQ> multiclass_q_v2(const Matrix& scores,
                                         const std::vector<int>& labels,
                                         const std::set<int>& critical,
                                         double delta,
                                         const std::vector<long>* ids = nullptr);

std::vector<MulticlassQ> multiclass_q_bruteforce(
    const Matrix& scores, const std::vector<int>& labels,
    const std::set<int>& critical, double delta, bool second_term,
    const std::vector<long>* ids = nullptr);

double multiclass_penalty(const std::vector<MulticlassQ>& qs,
                          const ConstraintState& state);

// Gradient of multiclass_penalty w.r.t. the score matrix.
Matrix multiclass_penalty_gradient(const Matrix& scores,
                                   const std::vector<int>& labels,
                                   const std::set<int>& critical,
                                   const ConstraintState& state,
                                   bool second_term,
                                   const std::vector<long>* ids = nullptr);

// The same hinge terms regrouped three ways; used by the swap-preference
// analysis. Sums are raw (no mu/lambda/normalizer applied).
struct GroupedHinges {
  double per_positive_sq = 0.0;  // sum over positives of q_j^2
  double per_negative_sq = 0.0;  // sum over negatives of c_k^2
  double per_pair_sq = 0.0;      // sum over pairs of h_jk^2
  double hinge_mass = 0.0;       // sum of all hinge terms (same under any grouping)
};

GroupedHinges variant_penalties(const std::vector<double>& pos_scores,
                                const std::vector<double>& neg_scores,
                                double delta);

}  // namespace auctk

#include "auctk/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace auctk {

double ConstraintState::mean_lambda() const {
  if (lambda.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [k, v] : lambda) s += v;
  return s / static_cast<double>(lambda.size());
}

std::string ConstraintState::to_json() const {
  nlohmann::json j;
  j["mu"] = mu;
  j["rho"] = rho;
  j["delta"] = delta;
  nlohmann::json lam = nlohmann::json::object();
  for (const auto& [key, value] : lambda)
    lam[std::to_string(key.cls) + ":" + std::to_string(key.sample_id)] = value;
  j["lambda"] = lam;
  return j.dump();
}

ConstraintState ConstraintState::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ConstraintState s;
  s.mu = j.at("mu").get<double>();
  s.rho = j.at("rho").get<double>();
  s.delta = j.at("delta").get<double>();
  for (const auto& [k, v] : j.at("lambda").items()) {
    auto colon = k.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("bad lambda key: " + k);
    LambdaKey key{std::stoi(k.substr(0, colon)),
                  std::stol(k.substr(colon + 1))};
    s.lambda[key] = v.get<double>();
  }
  return s;
}

double QVector::sum() const {
  double s = 0.0;
  for (double v : q) s += v;
  return s;
}

double QVector::sum_sq() const {
  double s = 0.0;
  for (double v : q) s += v * v;
  return s;
}

namespace {

std::vector<long> default_ids(std::size_t n, const std::vector<long>* ids) {
  if (ids) {
    if (ids->size() != n)
      throw std::invalid_argument("ids/scores length mismatch");
    return *ids;
  }
  std::vector<long> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<long>(i);
  return out;
}

}  // namespace

QVector q_values(const std::vector<double>& pos_scores,
                 const std::vector<double>& neg_scores, double delta,
                 const std::vector<long>* ids) {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  QVector out;
  out.ids = default_ids(pos_scores.size(), ids);
  out.q.assign(pos_scores.size(), 0.0);
  out.violations.assign(pos_scores.size(), 0);
  if (neg_scores.empty()) return out;

  std::vector<double> sorted_neg = neg_scores;
  std::sort(sorted_neg.begin(), sorted_neg.end());
  // suffix[i] = sum of sorted_neg[i..]
  std::vector<double> suffix(sorted_neg.size() + 1, 0.0);
  for (std::size_t i = sorted_neg.size(); i-- > 0;)
    suffix[i] = suffix[i + 1] + sorted_neg[i];

  for (std::size_t j = 0; j < pos_scores.size(); ++j) {
    const double cut = pos_scores[j] - delta;
    // strict violators: n_k > p_j - delta
    auto it = std::upper_bound(sorted_neg.begin(), sorted_neg.end(), cut);
    std::size_t idx = static_cast<std::size_t>(it - sorted_neg.begin());
    std::size_t count = sorted_neg.size() - idx;
    out.violations[j] = count;
    out.q[j] = suffix[idx] - static_cast<double>(count) * cut;
  }
  return out;
}

QVector q_values_bruteforce(const std::vector<double>& pos_scores,
                            const std::vector<double>& neg_scores,
                            double delta, const std::vector<long>* ids) {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  QVector out;
  out.ids = default_ids(pos_scores.size(), ids);
  out.q.assign(pos_scores.size(), 0.0);
  out.violations.assign(pos_scores.size(), 0);
  for (std::size_t j = 0; j < pos_scores.size(); ++j) {
    for (double n : neg_scores) {
      double h = n - pos_scores[j] + delta;
      if (h > 0.0) {
        out.q[j] += h;
        out.violations[j] += 1;
      }
    }
  }
  return out;
}

PenaltyTerms penalty_terms(const QVector& q, const ConstraintState& state,
                           std::size_t p_count, std::size_t n_count,
                           int critical_class) {
  if (p_count == 0 || n_count == 0)
    throw std::invalid_argument("penalty needs at least one sample per class");
  const double norm =
      static_cast<double>(p_count) * static_cast<double>(n_count);
  PenaltyTerms t;
  double sum_sq = 0.0, lin = 0.0;
  for (std::size_t j = 0; j < q.q.size(); ++j) {
    sum_sq += q.q[j] * q.q[j];
    lin += state.lambda_for({critical_class, q.ids[j]}) * q.q[j];
  }
  t.quadratic = state.mu * sum_sq / (2.0 * norm);
  t.linear = lin / norm;
  return t;
}

PenaltyGradient penalty_gradient(const std::vector<double>& pos_scores,
                                 const std::vector<double>& neg_scores,
                                 const ConstraintState& state, double delta,
                                 const std::vector<long>* ids,
                                 int critical_class) {
  QVector q = q_values(pos_scores, neg_scores, delta, ids);
  PenaltyGradient g;
  g.dpos.assign(pos_scores.size(), 0.0);
  g.dneg.assign(neg_scores.size(), 0.0);
  if (pos_scores.empty() || neg_scores.empty()) return g;
  const double norm = static_cast<double>(pos_scores.size()) *
                      static_cast<double>(neg_scores.size());

  // weight of each positive's constraint in the differentiated penalty
  std::vector<double> weight(pos_scores.size());
  for (std::size_t j = 0; j < pos_scores.size(); ++j) {
    weight[j] = (state.mu * q.q[j] +
                 state.lambda_for({critical_class, q.ids[j]})) /
                norm;
    g.dpos[j] = -weight[j] * static_cast<double>(q.violations[j]);
  }

  // dneg_k sums the weights of positives it violates against:
  // p_j < n_k + delta. Sorted positives + prefix sums keep it O(N log P).
  std::vector<std::size_t> order(pos_scores.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pos_scores[a] < pos_scores[b];
  });
  std::vector<double> sorted_pos(order.size()), prefix(order.size() + 1, 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    sorted_pos[r] = pos_scores[order[r]];
    prefix[r + 1] = prefix[r] + weight[order[r]];
  }
  for (std::size_t k = 0; k < neg_scores.size(); ++k) {
    auto it = std::lower_bound(sorted_pos.begin(), sorted_pos.end(),
                               neg_scores[k] + delta);
    g.dneg[k] = prefix[static_cast<std::size_t>(it - sorted_pos.begin())];
  }
  return g;
}

void apply_lambda_update(ConstraintState& state, const QVector& q,
                         int critical_class) {
  for (std::size_t j = 0; j < q.q.size(); ++j) {
    if (q.q[j] < 0.0) throw std::invalid_argument("q must be >= 0");
    state.lambda[{critical_class, q.ids[j]}] += state.mu * q.q[j];
  }
}

namespace {

struct ClassIndex {
  std::vector<std::size_t> critical_rows;   // rows per critical class
  std::vector<std::size_t> noncrit_rows;    // all non-critical rows
};

void check_labels(const Matrix& scores, const std::vector<int>& labels,
                  const std::set<int>& critical) {
  if (scores.rows() != labels.size())
    throw std::invalid_argument("scores/labels length mismatch");
  if (critical.empty())
    throw std::invalid_argument("critical set must be non-empty");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= scores.cols())
      throw std::invalid_argument("label outside class range");
  for (int c : critical)
    if (c < 0 || static_cast<std::size_t>(c) >= scores.cols())
      throw std::invalid_argument("critical class outside class range");
}

std::vector<MulticlassQ> multiclass_q_impl(const Matrix& scores,
                                           const std::vector<int>& labels,
                                           const std::set<int>& critical,
                                           double delta, bool second_term,
                                           const std::vector<long>* row_ids) {
  check_labels(scores, labels, critical);
  std::vector<long> stable = default_ids(labels.size(), row_ids);
  std::vector<std::size_t> noncrit;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
    if (!critical.count(labels[i])) noncrit.push_back(i);
  }

  std::vector<MulticlassQ> out;
  for (int c : critical) {
    MulticlassQ mq;
    mq.critical_class = c;
    auto it = by_class.find(c);
    const std::vector<std::size_t> crit_rows =
        it == by_class.end() ? std::vector<std::size_t>{} : it->second;
    mq.p_count = crit_rows.size();
    mq.n_count = noncrit.size();

    std::vector<double> pos, neg;
    std::vector<long> ids;
    for (std::size_t r : crit_rows) {
      pos.push_back(scores(r, static_cast<std::size_t>(c)));
      ids.push_back(stable[r]);
    }
    for (std::size_t r : noncrit)
      neg.push_back(scores(r, static_cast<std::size_t>(c)));
    mq.q = q_values(pos, neg, delta, &ids);

    if (second_term) {
      // reverse hinge per non-critical class i on its own score column:
      // max(0, f^i(x_j) - f^i(x_k) + delta) over critical j, class-i k
      for (const auto& [cls, rows] : by_class) {
        if (critical.count(cls)) continue;
        std::vector<double> own_sorted;
        for (std::size_t r : rows)
          own_sorted.push_back(scores(r, static_cast<std::size_t>(cls)));
        std::sort(own_sorted.begin(), own_sorted.end());
        std::vector<double> prefix(own_sorted.size() + 1, 0.0);
        for (std::size_t i = 0; i < own_sorted.size(); ++i)
          prefix[i + 1] = prefix[i] + own_sorted[i];
        for (std::size_t j = 0; j < crit_rows.size(); ++j) {
          double a = scores(crit_rows[j], static_cast<std::size_t>(cls));
          // violators: b_k < a + delta
          auto lo = std::lower_bound(own_sorted.begin(), own_sorted.end(),
                                     a + delta);
          std::size_t count =
              static_cast<std::size_t>(lo - own_sorted.begin());
          mq.q.q[j] += static_cast<double>(count) * (a + delta) - prefix[count];
          mq.q.violations[j] += count;
        }
      }
    }
    out.push_back(std::move(mq));
  }
  return out;
}

}  // namespace

std::vector<MulticlassQ> multiclass_q_v1(const Matrix& scores,
                                         const std::vector<int>& labels,
                                         const std::set<int>& critical,
                                         double delta,
                                         const std::vector<long>* ids) {
  return multiclass_q_impl(scores, labels, critical, delta, false, ids);
}

std::vector<MulticlassQ> multiclass_q_v2(const Matrix& scores,
                                         const std::vector<int>& labels,
                                         const std::set<int>& critical,
                                         double delta,
                                         const std::vector<long>* ids) {
  return multiclass_q_impl(scores, labels, critical, delta, true, ids);
}

std::vector<MulticlassQ> multiclass_q_bruteforce(
    const Matrix& scores, const std::vector<int>& labels,
    const std::set<int>& critical, double delta, bool second_term,
    const std::vector<long>* ids) {
  check_labels(scores, labels, critical);
  std::vector<long> stable = default_ids(labels.size(), ids);
  std::vector<MulticlassQ> out;
  for (int c : critical) {
    MulticlassQ mq;
    mq.critical_class = c;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != c) continue;
      mq.p_count += 1;
      double qj = 0.0;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        if (critical.count(labels[k])) continue;
        double h = scores(k, static_cast<std::size_t>(c)) -
                   scores(j, static_cast<std::size_t>(c)) + delta;
        if (h > 0.0) qj += h;
        if (second_term) {
          int i = labels[k];
          double h2 = scores(j, static_cast<std::size_t>(i)) -
                      scores(k, static_cast<std::size_t>(i)) + delta;
          if (h2 > 0.0) qj += h2;
        }
      }
      mq.q.ids.push_back(stable[j]);
      mq.q.q.push_back(qj);
      mq.q.violations.push_back(0);
    }
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (!critical.count(labels[k])) mq.n_count += 1;
    out.push_back(std::move(mq));
  }
  return out;
}

double multiclass_penalty(const std::vector<MulticlassQ>& qs,
                          const ConstraintState& state) {
  double total = 0.0;
  for (const auto& mq : qs) {
    if (mq.p_count == 0 || mq.n_count == 0) continue;
    PenaltyTerms t =
        penalty_terms(mq.q, state, mq.p_count, mq.n_count, mq.critical_class);
    total += t.total();
  }
  return total;
}

Matrix multiclass_penalty_gradient(const Matrix& scores,
                                   const std::vector<int>& labels,
                                   const std::set<int>& critical,
                                   const ConstraintState& state,
                                   bool second_term,
                                   const std::vector<long>* ids) {
  check_labels(scores, labels, critical);
  auto qs = multiclass_q_bruteforce(scores, labels, critical, state.delta,
                                    second_term, ids);
  Matrix g(scores.rows(), scores.cols());
  for (const auto& mq : qs) {
    if (mq.p_count == 0 || mq.n_count == 0) continue;
    const int c = mq.critical_class;
    const double norm = static_cast<double>(mq.p_count) *
                        static_cast<double>(mq.n_count);
    // q entries follow row order of the critical-class samples
    std::size_t idx = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != c) continue;
      const double weight =
          (state.mu * mq.q.q[idx] + state.lambda_for({c, mq.q.ids[idx]})) /
          norm;
      ++idx;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        if (critical.count(labels[k])) continue;
        double h = scores(k, static_cast<std::size_t>(c)) -
                   scores(j, static_cast<std::size_t>(c)) + state.delta;
        if (h > 0.0) {
          g(j, static_cast<std::size_t>(c)) -= weight;
          g(k, static_cast<std::size_t>(c)) += weight;
        }
        if (second_term) {
          int i = labels[k];
          double h2 = scores(j, static_cast<std::size_t>(i)) -
                      scores(k, static_cast<std::size_t>(i)) + state.delta;
          if (h2 > 0.0) {
            g(j, static_cast<std::size_t>(i)) += weight;
            g(k, static_cast<std::size_t>(i)) -= weight;
          }
        }
      }
    }
  }
  return g;
}

GroupedHinges variant_penalties(const std::vector<double>& pos_scores,
                                const std::vector<double>& neg_scores,
                                double delta) {
  GroupedHinges out;
  std::vector<double> per_neg(neg_scores.size(), 0.0);
  for (std::size_t j = 0; j < pos_scores.size(); ++j) {
    double qj = 0.0;
    for (std::size_t k = 0; k < neg_scores.size(); ++k) {
      double h = neg_scores[k] - pos_scores[j] + delta;
      if (h > 0.0) {
        qj += h;
        per_neg[k] += h;
        out.per_pair_sq += h * h;
        out.hinge_mass += h;
      }
    }
    out.per_positive_sq += qj * qj;
  }
  for (double c : per_neg) out.per_negative_sq += c * c;
  return out;
}

}  // namespace auctk

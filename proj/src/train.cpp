#include "auctk/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "auctk/metrics.hpp"
#include "auctk/rng.hpp"

namespace auctk {

void AlmConfig::validate() const {
  if (!(mu0 >= 0.0)) throw std::invalid_argument("mu0 must be >= 0");
  if (!(rho > 1.0 && rho <= 4.0))
    throw std::invalid_argument("rho must be in (1,4]");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(val_tolerance >= 0.0))
    throw std::invalid_argument("val_tolerance must be >= 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be > 0");
  if (mc_variant != 1 && mc_variant != 2)
    throw std::invalid_argument("mc_variant must be 1 or 2");
}

std::string TrainingTrace::to_csv() const {
  std::string out =
      "epoch,val_metric,mu,mean_q,max_q,mean_lambda,loss_F,loss_quad,loss_lin\n";
  char buf[256];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  e.epoch, e.val_metric, e.mu, e.mean_q, e.max_q,
                  e.mean_lambda, e.loss_f, e.loss_quad, e.loss_lin);
    out += buf;
  }
  return out;
}

double mu_update(double mu, double rho, double current_metric,
                 double previous_metric, double tolerance) {
  if (!(rho > 1.0)) throw std::invalid_argument("rho must be > 1");
  if (current_metric < previous_metric - tolerance) return mu * rho;
  return mu;
}

double penalty_for_mode(PenaltyMode mode, const PenaltyTerms& terms) {
  switch (mode) {
    case PenaltyMode::alm: return terms.quadratic + terms.linear;
    case PenaltyMode::quadratic_only: return terms.quadratic;
    case PenaltyMode::lagrangian_only: return terms.linear;
    case PenaltyMode::none: return 0.0;
  }
  return 0.0;
}

Matrix model_outputs(const Mlp& model, const Dataset& data) {
  return model.forward(data.feature_matrix());
}

double validation_metric(const Mlp& model, const Dataset& data,
                         ValMetric metric) {
  Matrix out = model_outputs(model, data);
  if (metric == ValMetric::auc) {
    std::vector<double> scores(out.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) scores[i] = out(i, 0);
    return auc_from_scores(scores, data.labels());
  }
  return accuracy(out, data.labels());
}

namespace {

// State used by penalty_gradient restricted to one term of the penalty.
ConstraintState mode_state(const ConstraintState& state, PenaltyMode mode) {
  ConstraintState s = state;
  if (mode == PenaltyMode::quadratic_only) s.lambda.clear();
  if (mode == PenaltyMode::lagrangian_only) s.mu = 0.0;
  return s;
}

std::vector<std::vector<std::size_t>> plain_batches(std::size_t n,
                                                    std::size_t batch_size,
                                                    Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(idx.begin() + static_cast<long>(start),
                         idx.begin() + static_cast<long>(end));
  }
  return batches;
}

// Chunk the non-critical samples, then deal critical-class samples across
// batches so every batch sees at least one of each critical class. Critical
// samples cycle when there are fewer of them than batches.
std::vector<std::vector<std::size_t>> stratified_batches(
    const std::vector<int>& labels, const std::set<int>& critical,
    std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> rest;
  std::map<int, std::vector<std::size_t>> crit;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (critical.count(labels[i]))
      crit[labels[i]].push_back(i);
    else
      rest.push_back(i);
  }
  rng.shuffle(rest);
  for (auto& [cls, rows] : crit) rng.shuffle(rows);

  std::size_t per_batch_rest = batch_size > critical.size()
                                   ? batch_size - critical.size()
                                   : 1;
  std::size_t n_batches =
      std::max<std::size_t>(1, (rest.size() + per_batch_rest - 1) / per_batch_rest);
  std::vector<std::vector<std::size_t>> batches(n_batches);
  for (std::size_t i = 0; i < rest.size(); ++i)
    batches[i / per_batch_rest].push_back(rest[i]);
  for (auto& [cls, rows] : crit) {
    if (rows.size() >= n_batches) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        batches[i % n_batches].push_back(rows[i]);
    } else {
      for (std::size_t b = 0; b < n_batches; ++b)
        batches[b].push_back(rows[b % rows.size()]);
    }
  }
  return batches;
}

struct TaskInfo {
  bool binary = true;
  std::set<int> critical;
};

}  // namespace

TrainResult train(const Mlp& initial, const Dataset& train_data,
                  const Dataset& val_data, const LossSpec& loss,
                  const AlmConfig& config) {
  config.validate();
  loss.validate();

  TaskInfo task;
  task.binary = initial.head() == HeadKind::sigmoid;
  task.critical = train_data.critical_classes;
  if (task.binary) task.critical = {1};

  auto counts = train_data.class_counts();
  if (counts.size() < 2)
    throw std::invalid_argument("training data has a single class");
  for (int c : task.critical)
    if (!counts.count(c))
      throw std::invalid_argument("critical class " + std::to_string(c) +
                                  " has no training samples");

  ValMetric metric = config.val_metric;
  if (metric == ValMetric::auto_select)
    metric = task.binary ? ValMetric::auc : ValMetric::accuracy;

  // The stratified default exists to keep the penalty fed with positives;
  // penalty-free runs default to plain shuffling.
  bool stratified = config.stratified == StratifiedBatching::on;
  if (config.stratified == StratifiedBatching::automatic &&
      config.penalty_mode != PenaltyMode::none) {
    long largest = 0, smallest_critical = std::numeric_limits<long>::max();
    for (const auto& [cls, n] : counts) {
      largest = std::max(largest, n);
      if (task.critical.count(cls))
        smallest_critical = std::min(smallest_critical, n);
    }
    stratified = largest >= 50 * smallest_critical;
  }

  const Matrix features = train_data.feature_matrix();
  const std::vector<int> labels = train_data.labels();
  const std::size_t dim = train_data.feature_dim();

  TrainResult result;
  result.model = initial;
  result.state.mu = config.mu0;
  result.state.rho = config.rho;
  result.state.delta = config.delta;

  Mlp model = initial;
  AdamState adam;
  std::vector<double> best_params = model.flatten_parameters();
  double best_metric = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  double prev_metric = -std::numeric_limits<double>::infinity();
  ConstraintState best_state = result.state;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    auto batches =
        stratified
            ? stratified_batches(labels, task.critical, config.batch_size, rng)
            : plain_batches(labels.size(), config.batch_size, rng);

    double sum_f = 0.0, sum_quad = 0.0, sum_lin = 0.0;
    double sum_q = 0.0, max_q = 0.0;
    std::size_t q_count = 0;
    bool diverged = false;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& rows = batches[b];
      Matrix x(rows.size(), dim);
      std::vector<int> y(rows.size());
      std::vector<long> ids(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t d = 0; d < dim; ++d)
          x(r, d) = features(rows[r], d);
        y[r] = labels[rows[r]];
        ids[r] = train_data.samples[rows[r]].id;
      }

      ForwardTrace ft = model.forward_trace(x);
      LossResult lr = loss_and_gradient(loss, ft.output, y);
      Matrix upstream =
          lr.skipped ? Matrix(ft.output.rows(), ft.output.cols()) : lr.grad;
      double batch_loss = lr.loss;
      sum_f += lr.loss;

      if (config.penalty_mode != PenaltyMode::none) {
        if (task.binary) {
          std::vector<double> pos, neg;
          std::vector<long> pos_ids;
          std::vector<std::size_t> pos_rows, neg_rows;
          Matrix raw;
          if (config.constraint_on_logits) raw = model.forward_logits(x);
          for (std::size_t r = 0; r < rows.size(); ++r) {
            double score =
                config.constraint_on_logits ? raw(r, 0) : ft.output(r, 0);
            if (y[r] == 1) {
              pos.push_back(score);
              pos_ids.push_back(ids[r]);
              pos_rows.push_back(r);
            } else {
              neg.push_back(score);
              neg_rows.push_back(r);
            }
          }
          if (!pos.empty() && !neg.empty()) {
            QVector q = q_values(pos, neg, config.delta, &pos_ids);
            PenaltyTerms terms =
                penalty_terms(q, result.state, pos.size(), neg.size());
            batch_loss += penalty_for_mode(config.penalty_mode, terms);
            sum_quad += terms.quadratic;
            sum_lin += terms.linear;
            for (double qv : q.q) {
              sum_q += qv;
              max_q = std::max(max_q, qv);
            }
            q_count += q.q.size();

            ConstraintState grad_state =
                mode_state(result.state, config.penalty_mode);
            PenaltyGradient pg = penalty_gradient(pos, neg, grad_state,
                                                  config.delta, &pos_ids);
            for (std::size_t j = 0; j < pos_rows.size(); ++j) {
              double g = pg.dpos[j];
              if (config.constraint_on_logits) {
                double p = ft.output(pos_rows[j], 0);
                g /= std::max(p * (1.0 - p), 1e-300);
              }
              upstream(pos_rows[j], 0) += g;
            }
            for (std::size_t k = 0; k < neg_rows.size(); ++k) {
              double g = pg.dneg[k];
              if (config.constraint_on_logits) {
                double p = ft.output(neg_rows[k], 0);
                g /= std::max(p * (1.0 - p), 1e-300);
              }
              upstream(neg_rows[k], 0) += g;
            }

            if (config.penalty_mode == PenaltyMode::alm ||
                config.penalty_mode == PenaltyMode::lagrangian_only) {
              apply_lambda_update(result.state, q);
              if (config.record_batches)
                result.batch_log.push_back(
                    {epoch, b, 1, result.state.mu, q.ids, q.q});
            }
          }
        } else {
          // multi-class: penalty on softmax probabilities
          Matrix probs(ft.output.rows(), ft.output.cols());
          for (std::size_t r = 0; r < ft.output.rows(); ++r) {
            auto p = softmax_row(ft.output.row(r), ft.output.cols());
            for (std::size_t c = 0; c < p.size(); ++c) probs(r, c) = p[c];
          }
          bool second = config.mc_variant == 2;
          auto qs = (second ? multiclass_q_v2 : multiclass_q_v1)(
              probs, y, task.critical, config.delta, &ids);
          bool any = false;
          for (const auto& mq : qs)
            if (mq.p_count > 0 && mq.n_count > 0) any = true;
          if (any) {
            double quad = 0.0, lin = 0.0;
            for (const auto& mq : qs) {
              if (mq.p_count == 0 || mq.n_count == 0) continue;
              PenaltyTerms terms = penalty_terms(
                  mq.q, result.state, mq.p_count, mq.n_count,
                  mq.critical_class);
              quad += terms.quadratic;
              lin += terms.linear;
              for (double qv : mq.q.q) {
                sum_q += qv;
                max_q = std::max(max_q, qv);
              }
              q_count += mq.q.q.size();
            }
            PenaltyTerms combined{quad, lin};
            batch_loss += penalty_for_mode(config.penalty_mode, combined);
            sum_quad += quad;
            sum_lin += lin;

            ConstraintState grad_state =
                mode_state(result.state, config.penalty_mode);
            Matrix gp = multiclass_penalty_gradient(probs, y, task.critical,
                                                    grad_state, second, &ids);
            // chain through softmax per row
            for (std::size_t r = 0; r < probs.rows(); ++r) {
              double dot = 0.0;
              for (std::size_t c = 0; c < probs.cols(); ++c)
                dot += gp(r, c) * probs(r, c);
              for (std::size_t c = 0; c < probs.cols(); ++c)
                upstream(r, c) += probs(r, c) * (gp(r, c) - dot);
            }

            if (config.penalty_mode == PenaltyMode::alm ||
                config.penalty_mode == PenaltyMode::lagrangian_only) {
              for (const auto& mq : qs) {
                if (mq.p_count == 0 || mq.n_count == 0) continue;
                apply_lambda_update(result.state, mq.q, mq.critical_class);
                if (config.record_batches)
                  result.batch_log.push_back({epoch, b, mq.critical_class,
                                              result.state.mu, mq.q.ids,
                                              mq.q.q});
              }
            }
          }
        }
      }

      if (!std::isfinite(batch_loss)) {
        diverged = true;
        break;
      }
      GradientBuffer grads = model.backward(ft, upstream);
      if (!grads.finite()) {
        diverged = true;
        break;
      }
      try {
        if (config.optimizer == OptimizerKind::adam)
          adam_step(model, grads, adam, config.learning_rate);
        else
          sgd_step(model, grads, config.learning_rate);
      } catch (const std::runtime_error&) {
        diverged = true;
        break;
      }
    }

    if (diverged) {
      result.diverged = true;
      break;
    }

    double val = validation_metric(model, val_data, metric);
    EpochStats stats;
    stats.epoch = epoch;
    stats.val_metric = val;
    stats.mu = result.state.mu;
    stats.mean_q = q_count ? sum_q / static_cast<double>(q_count) : 0.0;
    stats.max_q = max_q;
    stats.mean_lambda = result.state.mean_lambda();
    const double nb = static_cast<double>(batches.size());
    stats.loss_f = sum_f / nb;
    stats.loss_quad = sum_quad / nb;
    stats.loss_lin = sum_lin / nb;
    result.trace.epochs.push_back(stats);

    result.state.mu = mu_update(result.state.mu, config.rho, val, prev_metric,
                                config.val_tolerance);
    prev_metric = val;

    if (val > best_metric) {
      best_metric = val;
      best_epoch = epoch;
      best_params = model.flatten_parameters();
      best_state = result.state;
    } else if (epoch - best_epoch >= config.patience) {
      break;
    }
  }

  result.model = model;
  result.model.unflatten_parameters(best_params);
  result.best_epoch = best_epoch;
  result.best_metric = best_metric;
  return result;
}

}  // namespace auctk

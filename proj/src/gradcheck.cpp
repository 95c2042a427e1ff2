#include "auctk/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "auctk/constraint.hpp"
#include "auctk/mlp.hpp"
#include "auctk/rng.hpp"

namespace auctk {

namespace {

constexpr double kStep = 1e-6;

LossSpec random_spec(LossKind kind, Rng& rng, bool multiclass) {
  LossSpec spec;
  spec.kind = kind;
  spec.w = rng.uniform(0.5, 5.0);
  spec.beta = rng.uniform(0.9, 0.9999);
  spec.gamma = rng.uniform(0.5, 2.5);
  spec.m = rng.uniform(0.1, 1.5);
  spec.s = rng.uniform(0.3, 0.6);
  spec.margin = rng.uniform(0.05, 0.5);
  std::size_t classes = multiclass ? 3 + rng.below(2) : 2;
  for (std::size_t c = 0; c < classes; ++c)
    spec.class_counts.push_back(5 + static_cast<long>(rng.below(100)));
  return spec;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, int classes) {
  std::vector<int> y(n);
  for (;;) {
    std::set<int> seen;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
      seen.insert(y[i]);
    }
    if (seen.size() == static_cast<std::size_t>(classes)) return y;
  }
}

// ReLU kinks and hinge kinks break central differences; resample until the
// instance keeps a safe distance from them.
bool near_relu_kink(const ForwardTrace& trace) {
  for (const auto& z : trace.preact)
    for (double v : z.data())
      if (std::abs(v) < 1e-4) return true;
  return false;
}

bool near_hinge_kink(const std::vector<double>& pos,
                     const std::vector<double>& neg, double delta) {
  for (double p : pos)
    for (double n : neg)
      if (std::abs(n - p + delta) < 1e-5) return true;
  return false;
}

}  // namespace

double fd_rel_err(double analytic, double numeric) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

GradCheck check_loss_output_gradient(LossKind kind, int trials,
                                     std::uint64_t seed) {
  Rng rng(seed);
  const bool multiclass = is_multiclass_loss(kind);
  GradCheck result;
  while (result.trials < static_cast<std::size_t>(trials)) {
    LossSpec spec = random_spec(kind, rng, multiclass);
    std::size_t n = 4 + rng.below(8);
    std::size_t cols = multiclass ? spec.class_counts.size() : 1;
    Matrix outputs(n, cols);
    for (double& v : outputs.data())
      v = multiclass ? rng.uniform(-2.0, 2.0) : rng.uniform(0.05, 0.95);
    std::vector<int> labels =
        random_labels(rng, n, static_cast<int>(cols == 1 ? 2 : cols));

    LossResult analytic = loss_and_gradient(spec, outputs, labels);
    if (analytic.skipped) continue;
    bool bad = false;
    for (std::size_t i = 0; i < outputs.data().size() && !bad; ++i) {
      double keep = outputs.data()[i];
      outputs.data()[i] = keep + kStep;
      double up = loss_and_gradient(spec, outputs, labels).loss;
      outputs.data()[i] = keep - kStep;
      double down = loss_and_gradient(spec, outputs, labels).loss;
      outputs.data()[i] = keep;
      double numeric = (up - down) / (2.0 * kStep);
      result.max_rel_err = std::max(
          result.max_rel_err, fd_rel_err(analytic.grad.data()[i], numeric));
    }
    result.trials += 1;
  }
  return result;
}

namespace {

struct NetInstance {
  Mlp net;
  Matrix batch;
  std::vector<int> labels;
};

NetInstance random_net_instance(Rng& rng, bool multiclass,
                                std::size_t classes) {
  for (;;) {
    std::size_t dim = 2 + rng.below(3);
    std::size_t width = 3 + rng.below(4);
    std::vector<std::size_t> dims{dim, width, width,
                                  multiclass ? classes : 1};
    NetInstance inst;
    inst.net = Mlp::make(dims,
                         multiclass ? HeadKind::identity_logits
                                    : HeadKind::sigmoid,
                         rng.next_u64());
    std::size_t n = 4 + rng.below(6);
    inst.batch = Matrix(n, dim);
    for (double& v : inst.batch.data()) v = rng.uniform(-1.5, 1.5);
    inst.labels = random_labels(rng, n, static_cast<int>(multiclass ? classes : 2));
    if (!near_relu_kink(inst.net.forward_trace(inst.batch))) return inst;
  }
}

template <typename LossFn, typename GradFn>
void fd_over_parameters(Mlp& net, const LossFn& loss_value,
                        const GradFn& analytic_grads, GradCheck& result) {
  GradientBuffer analytic = analytic_grads();
  std::vector<double> flat = net.flatten_parameters();
  std::vector<double> analytic_flat;
  for (std::size_t l = 0; l < analytic.dw.size(); ++l) {
    analytic_flat.insert(analytic_flat.end(), analytic.dw[l].data().begin(),
                         analytic.dw[l].data().end());
    analytic_flat.insert(analytic_flat.end(), analytic.db[l].begin(),
                         analytic.db[l].end());
  }
  for (std::size_t i = 0; i < flat.size(); ++i) {
    double keep = flat[i];
    flat[i] = keep + kStep;
    net.unflatten_parameters(flat);
    double up = loss_value();
    flat[i] = keep - kStep;
    net.unflatten_parameters(flat);
    double down = loss_value();
    flat[i] = keep;
    net.unflatten_parameters(flat);
    double numeric = (up - down) / (2.0 * kStep);
    result.max_rel_err =
        std::max(result.max_rel_err, fd_rel_err(analytic_flat[i], numeric));
  }
}

}  // namespace

GradCheck check_net_gradient(LossKind kind, int trials, std::uint64_t seed) {
  Rng rng(seed);
  const bool multiclass = is_multiclass_loss(kind);
  GradCheck result;
  while (result.trials < static_cast<std::size_t>(trials)) {
    LossSpec spec = random_spec(kind, rng, multiclass);
    NetInstance inst =
        random_net_instance(rng, multiclass, spec.class_counts.size());
    {
      LossResult probe =
          loss_and_gradient(spec, inst.net.forward(inst.batch), inst.labels);
      if (probe.skipped) continue;
    }
    auto loss_value = [&]() {
      return loss_and_gradient(spec, inst.net.forward(inst.batch), inst.labels)
          .loss;
    };
    auto analytic_grads = [&]() {
      ForwardTrace ft = inst.net.forward_trace(inst.batch);
      LossResult lr = loss_and_gradient(spec, ft.output, inst.labels);
      return inst.net.backward(ft, lr.grad);
    };
    fd_over_parameters(inst.net, loss_value, analytic_grads, result);
    result.trials += 1;
  }
  return result;
}

GradCheck check_augmented_binary(int trials, std::uint64_t seed,
                                 PenaltyMode mode) {
  Rng rng(seed);
  GradCheck result;
  while (result.trials < static_cast<std::size_t>(trials)) {
    LossSpec spec;
    spec.kind = LossKind::bce;
    NetInstance inst = random_net_instance(rng, false, 2);

    ConstraintState state;
    state.mu = rng.uniform(1e-4, 1e-1);
    state.delta = rng.uniform(0.0, 0.3);
    for (std::size_t i = 0; i < inst.labels.size(); ++i)
      if (inst.labels[i] == 1)
        state.lambda[{1, static_cast<long>(i)}] = rng.uniform(0.0, 0.5);

    auto split_scores = [&](const Matrix& out, std::vector<double>& pos,
                            std::vector<double>& neg,
                            std::vector<long>& pos_ids,
                            std::vector<std::size_t>& pos_rows,
                            std::vector<std::size_t>& neg_rows) {
      for (std::size_t i = 0; i < inst.labels.size(); ++i) {
        if (inst.labels[i] == 1) {
          pos.push_back(out(i, 0));
          pos_ids.push_back(static_cast<long>(i));
          pos_rows.push_back(i);
        } else {
          neg.push_back(out(i, 0));
          neg_rows.push_back(i);
        }
      }
    };

    {
      Matrix out = inst.net.forward(inst.batch);
      std::vector<double> pos, neg;
      std::vector<long> ids;
      std::vector<std::size_t> pr, nr;
      split_scores(out, pos, neg, ids, pr, nr);
      if (near_hinge_kink(pos, neg, state.delta)) continue;
    }

    auto loss_value = [&]() {
      Matrix out = inst.net.forward(inst.batch);
      LossResult lr = loss_and_gradient(spec, out, inst.labels);
      std::vector<double> pos, neg;
      std::vector<long> ids;
      std::vector<std::size_t> pr, nr;
      split_scores(out, pos, neg, ids, pr, nr);
      QVector q = q_values(pos, neg, state.delta, &ids);
      PenaltyTerms terms = penalty_terms(q, state, pos.size(), neg.size());
      double penalty = terms.quadratic + terms.linear;
      if (mode == PenaltyMode::quadratic_only) penalty = terms.quadratic;
      if (mode == PenaltyMode::lagrangian_only) penalty = terms.linear;
      return lr.loss + penalty;
    };
    auto analytic_grads = [&]() {
      ForwardTrace ft = inst.net.forward_trace(inst.batch);
      LossResult lr = loss_and_gradient(spec, ft.output, inst.labels);
      std::vector<double> pos, neg;
      std::vector<long> ids;
      std::vector<std::size_t> pr, nr;
      split_scores(ft.output, pos, neg, ids, pr, nr);
      ConstraintState grad_state = state;
      if (mode == PenaltyMode::quadratic_only) grad_state.lambda.clear();
      if (mode == PenaltyMode::lagrangian_only) grad_state.mu = 0.0;
      PenaltyGradient pg =
          penalty_gradient(pos, neg, grad_state, state.delta, &ids);
      Matrix upstream = lr.grad;
      for (std::size_t j = 0; j < pr.size(); ++j)
        upstream(pr[j], 0) += pg.dpos[j];
      for (std::size_t k = 0; k < nr.size(); ++k)
        upstream(nr[k], 0) += pg.dneg[k];
      return inst.net.backward(ft, upstream);
    };
    fd_over_parameters(inst.net, loss_value, analytic_grads, result);
    result.trials += 1;
  }
  return result;
}

GradCheck check_multiclass_penalty(bool second_term, int trials,
                                   std::uint64_t seed) {
  Rng rng(seed);
  GradCheck result;
  while (result.trials < static_cast<std::size_t>(trials)) {
    std::size_t classes = 3 + rng.below(2);
    std::size_t n = 5 + rng.below(6);
    std::set<int> critical{0};
    if (rng.below(3) == 0 && classes > 2) critical.insert(1);
    std::vector<int> labels =
        random_labels(rng, n, static_cast<int>(classes));
    Matrix scores(n, classes);
    std::vector<double> z(classes);
    for (std::size_t r = 0; r < n; ++r) {
      for (double& v : z) v = rng.uniform(-2.0, 2.0);
      auto row = softmax_row(z.data(), classes);
      for (std::size_t c = 0; c < classes; ++c) scores(r, c) = row[c];
    }

    ConstraintState state;
    state.mu = rng.uniform(1e-3, 0.5);
    state.delta = rng.uniform(0.0, 0.2);
    for (std::size_t i = 0; i < n; ++i)
      if (critical.count(labels[i]))
        state.lambda[{labels[i], static_cast<long>(i)}] =
            rng.uniform(0.0, 0.5);

    // kink guard over every hinge that appears in the penalty
    bool kink = false;
    for (std::size_t j = 0; j < n && !kink; ++j) {
      if (!critical.count(labels[j])) continue;
      for (std::size_t k = 0; k < n && !kink; ++k) {
        if (critical.count(labels[k])) continue;
        int c = labels[j];
        if (std::abs(scores(k, static_cast<std::size_t>(c)) -
                     scores(j, static_cast<std::size_t>(c)) + state.delta) <
            1e-5)
          kink = true;
        if (second_term) {
          int i = labels[k];
          if (std::abs(scores(j, static_cast<std::size_t>(i)) -
                       scores(k, static_cast<std::size_t>(i)) + state.delta) <
              1e-5)
            kink = true;
        }
      }
    }
    if (kink) continue;

    auto penalty_value = [&]() {
      auto qs = multiclass_q_bruteforce(scores, labels, critical, state.delta,
                                        second_term);
      return multiclass_penalty(qs, state);
    };
    Matrix analytic = multiclass_penalty_gradient(scores, labels, critical,
                                                  state, second_term);
    for (std::size_t i = 0; i < scores.data().size(); ++i) {
      double keep = scores.data()[i];
      scores.data()[i] = keep + kStep;
      double up = penalty_value();
      scores.data()[i] = keep - kStep;
      double down = penalty_value();
      scores.data()[i] = keep;
      double numeric = (up - down) / (2.0 * kStep);
      result.max_rel_err = std::max(result.max_rel_err,
                                    fd_rel_err(analytic.data()[i], numeric));
    }
    result.trials += 1;
  }
  return result;
}

}  // namespace auctk

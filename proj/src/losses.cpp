#include "auctk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "auctk/mlp.hpp"

namespace auctk {

namespace {

constexpr double kProbFloor = 1e-300;

double safe_log(double x) { return std::log(std::max(x, kProbFloor)); }

void check_binary_inputs(const Matrix& outputs, const std::vector<int>& labels) {
  if (outputs.rows() == 0) throw std::invalid_argument("empty batch");
  if (outputs.rows() != labels.size())
    throw std::invalid_argument("outputs/labels length mismatch");
  if (outputs.cols() != 1)
    throw std::invalid_argument("binary loss expects one output column");
  for (int y : labels)
    if (y != 0 && y != 1)
      throw std::invalid_argument("binary loss requires labels in {0,1}");
}

void check_multiclass_inputs(const Matrix& outputs,
                             const std::vector<int>& labels) {
  if (outputs.rows() == 0) throw std::invalid_argument("empty batch");
  if (outputs.rows() != labels.size())
    throw std::invalid_argument("outputs/labels length mismatch");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= outputs.cols())
      throw std::invalid_argument("label out of class range");
}

// Binary margin building blocks, expressed on the probability scale.
// sigmoid(z - m) with z = logit(p) equals p / (p + e^m (1-p)).
struct MarginTerm {
  double loss;
  double dloss_dp;
};

MarginTerm positive_margin(double p, double m) {
  double em = std::exp(m);
  double d = p + em * (1.0 - p);
  return {-safe_log(p / d), -em / std::max(p * d, kProbFloor)};
}

MarginTerm negative_margin(double p, double m) {
  double em = std::exp(m);
  double d = (1.0 - p) + em * p;
  return {-safe_log((1.0 - p) / d), em / std::max((1.0 - p) * d, kProbFloor)};
}

}  // namespace

void LossSpec::validate() const {
  if (kind == LossKind::wbce && !(w > 0.0))
    throw std::invalid_argument("wbce weight must be > 0");
  if ((kind == LossKind::cb_bce || kind == LossKind::cb_ce) &&
      !(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("class-balanced beta must be in [0,1)");
  if ((kind == LossKind::s_fl || kind == LossKind::a_fl) && !(gamma >= 0.0))
    throw std::invalid_argument("focal gamma must be >= 0");
  if ((kind == LossKind::a_fl || kind == LossKind::s_ml ||
       kind == LossKind::a_ml) &&
      !(m >= 0.0))
    throw std::invalid_argument("margin m must be >= 0");
  if (kind == LossKind::ldam && !(s > 0.0))
    throw std::invalid_argument("ldam scale must be > 0");
  if (kind == LossKind::mbauc && !(margin >= 0.0))
    throw std::invalid_argument("mbauc margin must be >= 0");
  if (kind == LossKind::cb_bce || kind == LossKind::cb_ce ||
      kind == LossKind::ldam) {
    if (class_counts.empty())
      throw std::invalid_argument(loss_kind_name(kind) +
                                  " needs class_counts");
    for (long n : class_counts)
      if (n <= 0)
        throw std::invalid_argument("class_counts must be strictly positive");
  }
}

bool is_multiclass_loss(LossKind kind) {
  return kind == LossKind::ce || kind == LossKind::cb_ce ||
         kind == LossKind::ldam;
}

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::bce: return "bce";
    case LossKind::ce: return "ce";
    case LossKind::wbce: return "wbce";
    case LossKind::cb_bce: return "cb_bce";
    case LossKind::cb_ce: return "cb_ce";
    case LossKind::s_fl: return "s_fl";
    case LossKind::a_fl: return "a_fl";
    case LossKind::s_ml: return "s_ml";
    case LossKind::a_ml: return "a_ml";
    case LossKind::ldam: return "ldam";
    case LossKind::mbauc: return "mbauc";
  }
  return "bce";
}

LossKind loss_kind_from_name(const std::string& name) {
  static const std::vector<std::pair<std::string, LossKind>> table = {
      {"bce", LossKind::bce},       {"ce", LossKind::ce},
      {"wbce", LossKind::wbce},     {"cb_bce", LossKind::cb_bce},
      {"cb_ce", LossKind::cb_ce},   {"s_fl", LossKind::s_fl},
      {"a_fl", LossKind::a_fl},     {"s_ml", LossKind::s_ml},
      {"a_ml", LossKind::a_ml},     {"ldam", LossKind::ldam},
      {"mbauc", LossKind::mbauc}};
  for (const auto& [n, k] : table)
    if (n == name) return k;
  throw std::invalid_argument("unknown loss kind: " + name);
}

std::vector<double> class_balanced_weights(const std::vector<long>& counts,
                                           double beta) {
  std::vector<double> w(counts.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    // (1-beta)/(1-beta^n); the beta->0 limit is uniform weighting
    double denom = 1.0 - std::pow(beta, static_cast<double>(counts[c]));
    w[c] = denom > 0.0 ? (1.0 - beta) / denom : 1.0;
    sum += w[c];
  }
  double scale = static_cast<double>(counts.size()) / sum;
  for (double& x : w) x *= scale;
  return w;
}

std::vector<double> softmax_row(const double* logits, std::size_t n) {
  double zmax = logits[0];
  for (std::size_t c = 1; c < n; ++c) zmax = std::max(zmax, logits[c]);
  std::vector<double> p(n);
  double sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    p[c] = std::exp(logits[c] - zmax);
    sum += p[c];
  }
  for (double& x : p) x /= sum;
  return p;
}

LossResult mbauc_loss(const Matrix& outputs, const std::vector<int>& labels,
                      double margin) {
  check_binary_inputs(outputs, labels);
  LossResult r;
  r.grad = Matrix(outputs.rows(), 1);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    r.skipped = true;
    return r;
  }
  const double inv = 1.0 / (static_cast<double>(pos.size()) *
                            static_cast<double>(neg.size()));
  double total = 0.0;
  for (std::size_t j : pos) {
    double fp = outputs(j, 0);
    for (std::size_t k : neg) {
      double h = margin - (fp - outputs(k, 0));
      if (h > 0.0) {
        total += h * h;
        r.grad(j, 0) += -2.0 * h * inv;
        r.grad(k, 0) += 2.0 * h * inv;
      }
    }
  }
  r.loss = total * inv;
  return r;
}

namespace {

LossResult binary_loss(const LossSpec& spec, const Matrix& outputs,
                       const std::vector<int>& labels) {
  check_binary_inputs(outputs, labels);
  const std::size_t n = outputs.rows();
  const double inv = 1.0 / static_cast<double>(n);

  std::vector<double> cb;
  if (spec.kind == LossKind::cb_bce)
    cb = class_balanced_weights(spec.class_counts, spec.beta);

  LossResult r;
  r.grad = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = outputs(i, 0);
    const int y = labels[i];
    double li = 0.0, gi = 0.0;
    switch (spec.kind) {
      case LossKind::bce: {
        li = y ? -safe_log(p) : -safe_log(1.0 - p);
        gi = y ? -1.0 / std::max(p, kProbFloor)
               : 1.0 / std::max(1.0 - p, kProbFloor);
        break;
      }
      case LossKind::wbce: {
        double wy = y ? spec.w : 1.0;
        li = wy * (y ? -safe_log(p) : -safe_log(1.0 - p));
        gi = wy * (y ? -1.0 / std::max(p, kProbFloor)
                     : 1.0 / std::max(1.0 - p, kProbFloor));
        break;
      }
      case LossKind::cb_bce: {
        double wy = cb.at(static_cast<std::size_t>(y));
        li = wy * (y ? -safe_log(p) : -safe_log(1.0 - p));
        gi = wy * (y ? -1.0 / std::max(p, kProbFloor)
                     : 1.0 / std::max(1.0 - p, kProbFloor));
        break;
      }
      case LossKind::s_fl: {
        double pt = y ? p : 1.0 - p;
        double mod = std::pow(1.0 - pt, spec.gamma);
        li = -mod * safe_log(pt);
        double dpt = -mod / std::max(pt, kProbFloor);
        if (spec.gamma > 0.0 && pt < 1.0)
          dpt += spec.gamma * std::pow(1.0 - pt, spec.gamma - 1.0) *
                 safe_log(pt);
        gi = y ? dpt : -dpt;
        break;
      }
      case LossKind::a_fl: {
        if (y) {
          MarginTerm t = positive_margin(p, spec.m);
          li = t.loss;
          gi = t.dloss_dp;
        } else {
          double pt = 1.0 - p;
          double mod = std::pow(p, spec.gamma);
          li = -mod * safe_log(pt);
          double dpt = -mod / std::max(pt, kProbFloor);
          if (spec.gamma > 0.0 && pt < 1.0)
            dpt += spec.gamma * std::pow(p, spec.gamma - 1.0) * safe_log(pt);
          gi = -dpt;
        }
        break;
      }
      case LossKind::s_ml: {
        MarginTerm t =
            y ? positive_margin(p, spec.m) : negative_margin(p, spec.m);
        li = t.loss;
        gi = t.dloss_dp;
        break;
      }
      case LossKind::a_ml: {
        if (y) {
          MarginTerm t = positive_margin(p, spec.m);
          li = t.loss;
          gi = t.dloss_dp;
        } else {
          li = -safe_log(1.0 - p);
          gi = 1.0 / std::max(1.0 - p, kProbFloor);
        }
        break;
      }
      default:
        throw std::logic_error("not a binary loss");
    }
    r.loss += li * inv;
    r.grad(i, 0) = gi * inv;
  }
  return r;
}

LossResult multiclass_loss(const LossSpec& spec, const Matrix& outputs,
                           const std::vector<int>& labels) {
  check_multiclass_inputs(outputs, labels);
  const std::size_t n = outputs.rows();
  const std::size_t num_classes = outputs.cols();
  const double inv = 1.0 / static_cast<double>(n);

  std::vector<double> cb;
  if (spec.kind == LossKind::cb_ce)
    cb = class_balanced_weights(spec.class_counts, spec.beta);
  std::vector<double> ldam_margin;
  if (spec.kind == LossKind::ldam) {
    if (spec.class_counts.size() != num_classes)
      throw std::invalid_argument("ldam class_counts/classes mismatch");
    for (long c : spec.class_counts)
      ldam_margin.push_back(spec.s /
                            std::pow(static_cast<double>(c), 0.25));
  }

  LossResult r;
  r.grad = Matrix(n, num_classes);
  std::vector<double> z(num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    for (std::size_t c = 0; c < num_classes; ++c) z[c] = outputs(i, c);
    if (spec.kind == LossKind::ldam)
      z[static_cast<std::size_t>(y)] -= ldam_margin[static_cast<std::size_t>(y)];
    std::vector<double> p = softmax_row(z.data(), num_classes);
    double wy = 1.0;
    if (spec.kind == LossKind::cb_ce) wy = cb.at(static_cast<std::size_t>(y));
    r.loss += wy * -safe_log(p[static_cast<std::size_t>(y)]) * inv;
    for (std::size_t c = 0; c < num_classes; ++c) {
      double g = p[c] - (static_cast<int>(c) == y ? 1.0 : 0.0);
      r.grad(i, c) = wy * g * inv;
    }
  }
  return r;
}

}  // namespace

LossResult loss_and_gradient(const LossSpec& spec, const Matrix& outputs,
                             const std::vector<int>& labels) {
  spec.validate();
  if (spec.kind == LossKind::mbauc)
    return mbauc_loss(outputs, labels, spec.margin);
  if (is_multiclass_loss(spec.kind))
    return multiclass_loss(spec, outputs, labels);
  return binary_loss(spec, outputs, labels);
}

}  // namespace auctk

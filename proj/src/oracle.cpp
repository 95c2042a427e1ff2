#include "auctk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "auctk/constraint.hpp"

namespace auctk {

std::size_t ToyLayout::positive_count() const {
  std::size_t n = 0;
  for (bool p : positive) n += p ? 1 : 0;
  return n;
}

std::string ToyLayout::str() const {
  std::string s;
  for (bool p : positive) s += p ? 'P' : 'N';
  return s;
}

namespace {

struct HingeSums {
  long long sum = 0;     // total hinge mass in spacing units
  long long sum_sq = 0;  // sum of squared grouped violations
};

// Integer positions 0..9, zero margin; violation of pair (p, n) is n - p
// when the negative scores higher.
HingeSums grouped_sums(const ToyLayout& layout, ConstraintGrouping grouping) {
  std::vector<long long> pos, neg;
  for (int i = 0; i < 10; ++i)
    (layout.positive[static_cast<std::size_t>(i)] ? pos : neg).push_back(i);

  HingeSums out;
  if (grouping == ConstraintGrouping::per_positive) {
    for (long long p : pos) {
      long long q = 0;
      for (long long n : neg)
        if (n > p) q += n - p;
      out.sum += q;
      out.sum_sq += q * q;
    }
  } else if (grouping == ConstraintGrouping::per_negative) {
    for (long long n : neg) {
      long long c = 0;
      for (long long p : pos)
        if (n > p) c += n - p;
      out.sum += c;
      out.sum_sq += c * c;
    }
  } else {
    for (long long p : pos)
      for (long long n : neg)
        if (n > p) {
          out.sum += n - p;
          out.sum_sq += (n - p) * (n - p);
        }
  }
  return out;
}

int leftmost_positive(const ToyLayout& layout) {
  for (int i = 0; i < 10; ++i)
    if (layout.positive[static_cast<std::size_t>(i)]) return i;
  return -1;
}

int rightmost_negative(const ToyLayout& layout) {
  for (int i = 9; i >= 0; --i)
    if (!layout.positive[static_cast<std::size_t>(i)]) return i;
  return -1;
}

int nearest_positive_left(const ToyLayout& layout, int from) {
  for (int i = from - 1; i >= 0; --i)
    if (layout.positive[static_cast<std::size_t>(i)]) return i;
  return -1;
}

}  // namespace

bool swap_applicable(const ToyLayout& layout, SwapKind kind) {
  if (kind == SwapKind::left) {
    int a = leftmost_positive(layout);
    return a >= 0 && a < 9 && !layout.positive[static_cast<std::size_t>(a + 1)];
  }
  int b = rightmost_negative(layout);
  return b >= 0 && nearest_positive_left(layout, b) >= 0;
}

ToyLayout apply_swap(const ToyLayout& layout, SwapKind kind) {
  if (!swap_applicable(layout, kind))
    throw std::invalid_argument("swap not applicable to this layout");
  ToyLayout out = layout;
  if (kind == SwapKind::left) {
    int a = leftmost_positive(layout);
    std::swap(out.positive[static_cast<std::size_t>(a)],
              out.positive[static_cast<std::size_t>(a + 1)]);
  } else {
    int b = rightmost_negative(layout);
    int p = nearest_positive_left(layout, b);
    std::swap(out.positive[static_cast<std::size_t>(p)],
              out.positive[static_cast<std::size_t>(b)]);
  }
  return out;
}

SwapDecrement swap_decrement(const ToyLayout& layout, SwapKind kind,
                             ConstraintGrouping grouping) {
  HingeSums before = grouped_sums(layout, grouping);
  // a perfectly ranked layout has no improving swap left; its decrement is 0
  if (before.sum == 0) return SwapDecrement{Rational(0), Rational(0)};
  ToyLayout after = apply_swap(layout, kind);
  HingeSums post = grouped_sums(after, grouping);
  // penalty = mu d^2 sum_sq / (2*5*5) + lambda d sum / (5*5)
  SwapDecrement dec;
  dec.quad = Rational(before.sum_sq - post.sum_sq, 50);
  dec.lin = Rational(before.sum - post.sum, 25);
  return dec;
}

std::vector<LayoutMatch> enumerate_layouts() {
  const SwapDecrement target{Rational(39, 50), Rational(3, 25)};
  std::vector<LayoutMatch> matches;
  for (unsigned mask = 0; mask < 1024; ++mask) {
    if (__builtin_popcount(mask) != 5) continue;
    ToyLayout layout;
    for (int i = 0; i < 10; ++i)
      layout.positive[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    if (!swap_applicable(layout, SwapKind::left)) continue;
    SwapDecrement left = swap_decrement(layout, SwapKind::left);
    if (!(left == target)) continue;
    LayoutMatch m;
    m.layout = layout;
    m.left = left;
    if (swap_applicable(layout, SwapKind::right))
      m.right = swap_decrement(layout, SwapKind::right);
    matches.push_back(std::move(m));
  }
  return matches;
}

bool AsymmetryReport::strictly_prefers(const SwapDecrement& a,
                                       const SwapDecrement& b) {
  return (a.quad > b.quad && a.lin >= b.lin) ||
         (a.quad >= b.quad && a.lin > b.lin);
}

AsymmetryReport asymmetry_demo(const ToyLayout& layout) {
  AsymmetryReport r;
  r.per_positive_left =
      swap_decrement(layout, SwapKind::left, ConstraintGrouping::per_positive);
  r.per_positive_right =
      swap_decrement(layout, SwapKind::right, ConstraintGrouping::per_positive);
  r.per_negative_left =
      swap_decrement(layout, SwapKind::left, ConstraintGrouping::per_negative);
  r.per_negative_right =
      swap_decrement(layout, SwapKind::right, ConstraintGrouping::per_negative);
  r.per_pair_left =
      swap_decrement(layout, SwapKind::left, ConstraintGrouping::per_pair);
  r.per_pair_right =
      swap_decrement(layout, SwapKind::right, ConstraintGrouping::per_pair);
  return r;
}

void RankingScenario::validate() const {
  if (positives < 2 || negatives < 2)
    throw std::invalid_argument("need at least two samples per class");
  if (positives > negatives)
    throw std::invalid_argument("expects M <= N");
  if (!(delta > 0.0 && delta_p >= 0.0 && delta_n >= 0.0))
    throw std::invalid_argument("spacings must be positive");
}

namespace {

struct ScenarioLayout {
  std::vector<double> pos;  // pos[0] is the misplaced positive
  std::vector<double> neg;  // neg.back() is the misplaced negative
};

ScenarioLayout scenario_layout(const RankingScenario& c) {
  ScenarioLayout l;
  const double d = c.delta;
  l.pos.push_back(0.0);
  for (long k = 0; k < c.negatives - 1; ++k)
    l.neg.push_back(c.delta_p + static_cast<double>(k) * d);
  for (long j = 0; j < c.positives - 1; ++j)
    l.pos.push_back(c.delta_p +
                    static_cast<double>(c.negatives - 1 + j) * d);
  l.neg.push_back(c.delta_p +
                  static_cast<double>(c.negatives + c.positives - 3) * d +
                  c.delta_n);
  return l;
}

}  // namespace

RankingCost direct_cost(const RankingScenario& config) {
  config.validate();
  ScenarioLayout l = scenario_layout(config);
  RankingCost out;
  for (std::size_t j = 0; j < l.pos.size(); ++j) {
    double q = 0.0;
    for (double n : l.neg) {
      double h = n - l.pos[j];
      if (h > 0.0) q += h;
    }
    // post-update multiplier lambda + mu q, so the constraint contributes
    // mu/2 q^2 + (lambda + mu q) q = 3mu/2 q^2 + lambda q
    double term = 1.5 * config.mu * q * q + config.lambda * q;
    out.total += term;
    if (j == 0)
      out.positive_error_terms += term;
    else
      out.negative_error_terms += term;
  }
  return out;
}

RankingCost direct_cost_excluding_mispair(const RankingScenario& config) {
  config.validate();
  ScenarioLayout l = scenario_layout(config);
  RankingCost out;
  for (std::size_t j = 0; j < l.pos.size(); ++j) {
    double q = 0.0;
    for (std::size_t k = 0; k < l.neg.size(); ++k) {
      if (j == 0 && k + 1 == l.neg.size()) continue;  // the dropped pair
      double h = l.neg[k] - l.pos[j];
      if (h > 0.0) q += h;
    }
    double term = 1.5 * config.mu * q * q + config.lambda * q;
    out.total += term;
    if (j == 0)
      out.positive_error_terms += term;
    else
      out.negative_error_terms += term;
  }
  return out;
}

double bruteforce_cost(const RankingScenario& config) {
  config.validate();
  ScenarioLayout l = scenario_layout(config);
  QVector q = q_values(l.pos, l.neg, 0.0);
  double total = 0.0;
  for (double qj : q.q) {
    double lambda_post = config.lambda + config.mu * qj;
    total += 0.5 * config.mu * qj * qj + lambda_post * qj;
  }
  return total;
}

RankingCost closed_form_cost(const RankingScenario& config) {
  config.validate();
  const double M = static_cast<double>(config.positives);
  const double N = static_cast<double>(config.negatives);
  const double d = config.delta;
  const double dp = config.delta_p;
  const double dn = config.delta_n;
  const double mu = config.mu;
  const double lam = config.lambda;

  RankingCost out;
  out.positive_error_terms =
      1.5 * mu * dp * dp * (N - 1) * (N - 1) +
      dp * (1.5 * mu * d * (N - 1) * (N - 1) * (N - 2) + lam * (N - 1));
  out.negative_error_terms =
      1.5 * mu * dn * dn * (M - 1) +
      dn * (1.5 * mu * d * (M - 1) * (M - 2) + lam * (M - 1));
  double spacing_terms =
      1.5 * mu * d * d *
          ((N - 1) * (N - 1) * (N - 2) * (N - 2) / 4.0 +
           (2.0 * M - 3.0) * (M - 1) * (M - 2) / 6.0) +
      lam * d * ((N - 1) * (N - 2) / 2.0 + (M - 1) * (M - 2) / 2.0);
  out.total =
      out.positive_error_terms + out.negative_error_terms + spacing_terms;
  return out;
}

double positive_error_cost(const RankingScenario& config, double delta_p) {
  const double N = static_cast<double>(config.negatives);
  double a = (N - 1) * (N - 1);
  double b = 1.5 * config.mu * config.delta * (N - 1) * (N - 1) * (N - 2) +
             config.lambda * (N - 1);
  return a * delta_p * delta_p + b * delta_p;
}

double negative_error_cost(const RankingScenario& config, double delta_n) {
  const double M = static_cast<double>(config.positives);
  double c = M - 1;
  double d = 1.5 * config.mu * config.delta * (M - 1) * (M - 2) +
             config.lambda * (M - 1);
  return c * delta_n * delta_n + d * delta_n;
}

double equalizing_gap(const RankingScenario& config) {
  config.validate();
  const double M = static_cast<double>(config.positives);
  const double N = static_cast<double>(config.negatives);
  const double dp = config.delta_p;
  double a = (N - 1) * (N - 1);
  double b = 1.5 * config.mu * config.delta * (N - 1) * (N - 1) * (N - 2) +
             config.lambda * (N - 1);
  double c = M - 1;
  double d = 1.5 * config.mu * config.delta * (M - 1) * (M - 2) +
             config.lambda * (M - 1);
  double lead = 2.0 * dp * c + d;
  double disc = lead * lead - 4.0 * c * (dp * dp * (c - a) + dp * (d - b));
  if (disc < 0.0)
    throw std::domain_error("negative discriminant");
  return (-lead + std::sqrt(disc)) / (2.0 * c);
}

}  // namespace auctk

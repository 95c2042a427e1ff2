#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "auctk/rational.hpp"

namespace auctk {

// Ten markers ordered by classifier score with equal spacing, five of each
// class, shared multiplier value, zero margin. true = positive marker.
struct ToyLayout {
  std::array<bool, 10> positive{};

  std::size_t positive_count() const;
  std::string str() const;  // e.g. "NNPNNPPNPP", low score first
};

enum class SwapKind {
  left,   // leftmost positive with the negative on its immediate right
  right,  // rightmost negative with the nearest positive on its left
};

// Penalty decrease written as quad * mu * spacing^2 + lin * lambda * spacing,
// exact in rationals.
struct SwapDecrement {
  Rational quad;
  Rational lin;

  bool operator==(const SwapDecrement&) const = default;
};

enum class ConstraintGrouping { per_positive, per_negative, per_pair };

bool swap_applicable(const ToyLayout& layout, SwapKind kind);
ToyLayout apply_swap(const ToyLayout& layout, SwapKind kind);

// Exact decrement of the penalty under a grouping, by brute-force pair
// enumeration before and after the swap. Throws if the swap is inapplicable.
SwapDecrement swap_decrement(const ToyLayout& layout, SwapKind kind,
                             ConstraintGrouping grouping =
                                 ConstraintGrouping::per_positive);

struct LayoutMatch {
  ToyLayout layout;
  SwapDecrement left;
  std::optional<SwapDecrement> right;
};

// All C(10,5) = 252 orderings whose left-swap decrement under the
// per-positive grouping is exactly 39/50 mu d^2 + 3/25 lambda d.
std::vector<LayoutMatch> enumerate_layouts();

struct AsymmetryReport {
  SwapDecrement per_positive_left, per_positive_right;
  SwapDecrement per_negative_left, per_negative_right;
  SwapDecrement per_pair_left, per_pair_right;

  // decrement strictly larger for any mu > 0, lambda >= 0
  static bool strictly_prefers(const SwapDecrement& a, const SwapDecrement& b);
};

AsymmetryReport asymmetry_demo(const ToyLayout& layout);

// Ranking scenario with one misordered sample per class: the misplaced
// positive sits `delta_p` left of the lowest correct negative, the
// misplaced negative `delta_n` right of the highest correct positive, and
// all other adjacent gaps are `delta`.
struct RankingScenario {
  long positives = 2;  // M
  long negatives = 2;  // N, with M <= N
  double delta = 1.0;
  double delta_p = 1.0;
  double delta_n = 1.0;
  double lambda = 1.0;
  double mu = 1.0;

  void validate() const;
};

struct RankingCost {
  double total = 0.0;
  double positive_error_terms = 0.0;  // constraint of the misplaced positive
  double negative_error_terms = 0.0;  // constraints driven by the misplaced negative
};

// Aggregate 3mu/2 sum q_j^2 + lambda sum q_j with q from the explicit
// layout (every inverted pair counted). This is the ground truth.
RankingCost direct_cost(const RankingScenario& config);

// Same aggregate computed pair-by-pair without materialising q, as an
// independent route for cross-checking direct_cost.
double bruteforce_cost(const RankingScenario& config);

// The closed-form expression; omits the pair between the two misplaced
// samples, so it generally undershoots direct_cost.
RankingCost closed_form_cost(const RankingScenario& config);

// direct_cost with the misplaced-positive/misplaced-negative pair excluded
// from q_1, i.e. the pair convention the closed form uses.
RankingCost direct_cost_excluding_mispair(const RankingScenario& config);

// Positive root of the quadratic that equalises the two error
// contributions when delta_n = delta_p + root.
double equalizing_gap(const RankingScenario& config);

double positive_error_cost(const RankingScenario& config, double delta_p);
double negative_error_cost(const RankingScenario& config, double delta_n);

}  // namespace auctk

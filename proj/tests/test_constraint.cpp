#include <algorithm>
#include <cmath>

#include "auctk/constraint.hpp"
#include "auctk/gradcheck.hpp"
#include "auctk/rng.hpp"
#include "doctest.h"

using namespace auctk;

TEST_CASE("q is zero when every positive clears every negative") {
  QVector q = q_values({0.9}, {0.1, 0.2}, 0.0);
  CHECK(q.q == std::vector<double>{0.0});
}

TEST_CASE("q sums the pairwise hinge violations") {
  QVector q = q_values({0.3}, {0.5, 0.8}, 0.1);
  // (0.5 - 0.3 + 0.1) + (0.8 - 0.3 + 0.1)
  CHECK(q.q[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(q.violations[0] == 2);
}

TEST_CASE("fast path equals brute force on random instances") {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t p = 1 + rng.below(64);
    std::size_t n = 1 + rng.below(64);
    std::vector<double> pos(p), neg(n);
    for (double& v : pos) v = rng.uniform();
    for (double& v : neg) v = rng.uniform();
    double delta = rng.uniform(0.0, 0.5);
    QVector fast = q_values(pos, neg, delta);
    QVector slow = q_values_bruteforce(pos, neg, delta);
    for (std::size_t j = 0; j < p; ++j) {
      worst = std::max(worst, std::abs(fast.q[j] - slow.q[j]));
      CHECK(fast.violations[j] == slow.violations[j]);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("q vanishes exactly when the margin separates the classes") {
  Rng rng(18);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t p = 1 + rng.below(16);
    std::size_t n = 1 + rng.below(16);
    std::vector<double> pos(p), neg(n);
    for (double& v : pos) v = rng.uniform();
    for (double& v : neg) v = rng.uniform();
    double delta = rng.uniform(0.0, 0.4);
    QVector q = q_values(pos, neg, delta);
    bool all_zero = true;
    for (double v : q.q) all_zero = all_zero && v == 0.0;
    double min_pos = *std::min_element(pos.begin(), pos.end());
    double max_neg = *std::max_element(neg.begin(), neg.end());
    CHECK(all_zero == (min_pos - max_neg >= delta));
  }
}

TEST_CASE("shifting all scores by a constant leaves q unchanged") {
  Rng rng(19);
  std::vector<double> pos, neg;
  for (int i = 0; i < 9; ++i) pos.push_back(rng.uniform());
  for (int i = 0; i < 13; ++i) neg.push_back(rng.uniform());
  QVector base = q_values(pos, neg, 0.15);
  for (double& v : pos) v += 5.25;
  for (double& v : neg) v += 5.25;
  QVector shifted = q_values(pos, neg, 0.15);
  for (std::size_t j = 0; j < base.q.size(); ++j)
    CHECK(shifted.q[j] == doctest::Approx(base.q[j]).epsilon(1e-12));
}

TEST_CASE("penalty terms") {
  ConstraintState state;
  SUBCASE("all-zero q gives a zero penalty") {
    QVector q = q_values({0.9, 0.8}, {0.1}, 0.0);
    PenaltyTerms t = penalty_terms(q, state, 2, 1);
    CHECK(t.quadratic == 0.0);
    CHECK(t.linear == 0.0);
  }
  SUBCASE("single positive follows the scalar arithmetic") {
    QVector q;
    q.ids = {0};
    q.q = {2.0};
    q.violations = {1};
    state.mu = 0.1;
    state.lambda[{1, 0}] = 0.5;
    PenaltyTerms t = penalty_terms(q, state, 1, 4);
    CHECK(t.quadratic == doctest::Approx(0.1 * 4.0 / 8.0).epsilon(1e-15));
    CHECK(t.linear == doctest::Approx(0.5 * 2.0 / 4.0).epsilon(1e-15));
  }
  SUBCASE("empty classes are rejected") {
    QVector q;
    CHECK_THROWS_AS(penalty_terms(q, state, 0, 3), std::invalid_argument);
  }
}

TEST_CASE("penalty gradient") {
  ConstraintState state;
  state.mu = 0.2;
  state.delta = 0.0;
  SUBCASE("separated scores have zero gradient") {
    PenaltyGradient g = penalty_gradient({0.9, 0.8}, {0.1, 0.2}, state, 0.0);
    for (double v : g.dpos) CHECK(v == 0.0);
    for (double v : g.dneg) CHECK(v == 0.0);
  }
  SUBCASE("one violating pair with zero lambda") {
    // q = 0.3, gradient magnitude mu*q/(P*N) on each side
    PenaltyGradient g = penalty_gradient({0.4}, {0.7}, state, 0.0);
    double expected = 0.2 * 0.3 / 1.0;
    CHECK(g.dpos[0] == doctest::Approx(-expected).epsilon(1e-12));
    CHECK(g.dneg[0] == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("matches finite differences on random instances") {
    Rng rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t p = 1 + rng.below(8);
      std::size_t n = 1 + rng.below(8);
      std::vector<double> pos(p), neg(n);
      for (double& v : pos) v = rng.uniform();
      for (double& v : neg) v = rng.uniform();
      ConstraintState s;
      s.mu = rng.uniform(0.01, 1.0);
      s.delta = rng.uniform(0.0, 0.3);
      for (std::size_t j = 0; j < p; ++j)
        s.lambda[{1, static_cast<long>(j)}] = rng.uniform(0.0, 1.0);

      // keep away from hinge kinks so central differences are clean
      bool kink = false;
      for (double a : pos)
        for (double b : neg)
          if (std::abs(b - a + s.delta) < 1e-5) kink = true;
      if (kink) continue;

      auto value = [&](const std::vector<double>& pp,
                       const std::vector<double>& nn) {
        QVector q = q_values(pp, nn, s.delta);
        PenaltyTerms t = penalty_terms(q, s, pp.size(), nn.size());
        return t.quadratic + t.linear;
      };
      PenaltyGradient g = penalty_gradient(pos, neg, s, s.delta);
      const double h = 1e-6;
      for (std::size_t j = 0; j < p; ++j) {
        auto up = pos, down = pos;
        up[j] += h;
        down[j] -= h;
        double numeric = (value(up, neg) - value(down, neg)) / (2.0 * h);
        worst = std::max(worst, fd_rel_err(g.dpos[j], numeric));
      }
      for (std::size_t k = 0; k < n; ++k) {
        auto up = neg, down = neg;
        up[k] += h;
        down[k] -= h;
        double numeric = (value(pos, up) - value(pos, down)) / (2.0 * h);
        worst = std::max(worst, fd_rel_err(g.dneg[k], numeric));
      }
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("lambda updates accumulate mu-weighted violations") {
  ConstraintState state;
  state.mu = 1e-3;
  QVector q;
  q.ids = {7};
  q.q = {2.0};
  q.violations = {1};
  apply_lambda_update(state, q);
  CHECK(state.lambda_for({1, 7}) == doctest::Approx(0.002).epsilon(1e-15));
  QVector zero;
  zero.ids = {7};
  zero.q = {0.0};
  zero.violations = {0};
  apply_lambda_update(state, zero);
  CHECK(state.lambda_for({1, 7}) == doctest::Approx(0.002).epsilon(1e-15));
}

TEST_CASE("constraint state serialises to json and back") {
  ConstraintState state;
  state.mu = 3e-4;
  state.rho = 3.0;
  state.delta = 0.25;
  state.lambda[{1, 42}] = 0.125;
  state.lambda[{2, 7}] = 0.5;
  ConstraintState copy = ConstraintState::from_json(state.to_json());
  CHECK(copy.mu == state.mu);
  CHECK(copy.rho == state.rho);
  CHECK(copy.delta == state.delta);
  CHECK(copy.lambda_for({1, 42}) == 0.125);
  CHECK(copy.lambda_for({2, 7}) == 0.5);
}

namespace {

Matrix random_prob_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  std::vector<double> z(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : z) v = rng.uniform(-2.0, 2.0);
    auto p = softmax_row(z.data(), cols);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = p[c];
  }
  return m;
}

}  // namespace

TEST_CASE("multiclass first constraint") {
  SUBCASE("separated batches have zero q") {
    Matrix scores(3, 3);
    scores(0, 0) = 0.8;  // critical sample, class 0
    scores(1, 0) = 0.1;
    scores(2, 0) = 0.2;
    auto qs = multiclass_q_v1(scores, {0, 1, 2}, {0}, 0.1);
    CHECK(qs.size() == 1);
    CHECK(qs[0].q.q == std::vector<double>{0.0});
  }
  SUBCASE("hand-evaluated hinge sum") {
    // critical logit 0.2; non-critical samples carry 0.4 and 0.1 on the
    // critical column; delta 0.05
    Matrix scores(3, 2);
    scores(0, 0) = 0.2;
    scores(1, 0) = 0.4;
    scores(2, 0) = 0.1;
    auto qs = multiclass_q_v1(scores, {0, 1, 1}, {0}, 0.05);
    CHECK(qs[0].q.q[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("fast path equals brute force") {
    Rng rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      std::size_t classes = 3 + rng.below(3);
      std::size_t n = 4 + rng.below(12);
      Matrix scores = random_prob_matrix(rng, n, classes);
      std::vector<int> labels(n);
      for (auto& y : labels)
        y = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
      std::set<int> critical{0};
      double delta = rng.uniform(0.0, 0.2);
      auto fast = multiclass_q_v1(scores, labels, critical, delta);
      auto slow = multiclass_q_bruteforce(scores, labels, critical, delta, false);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t c = 0; c < fast.size(); ++c) {
        REQUIRE(fast[c].q.q.size() == slow[c].q.q.size());
        for (std::size_t j = 0; j < fast[c].q.q.size(); ++j)
          worst = std::max(worst,
                           std::abs(fast[c].q.q[j] - slow[c].q.q[j]));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("multiclass second constraint") {
  SUBCASE("dominates the first constraint on every batch") {
    Rng rng(35);
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t classes = 3;
      std::size_t n = 4 + rng.below(10);
      Matrix scores = random_prob_matrix(rng, n, classes);
      std::vector<int> labels(n);
      for (auto& y : labels)
        y = static_cast<int>(rng.below(classes));
      double delta = rng.uniform(0.0, 0.2);
      auto v1 = multiclass_q_v1(scores, labels, {0}, delta);
      auto v2 = multiclass_q_v2(scores, labels, {0}, delta);
      for (std::size_t j = 0; j < v1[0].q.q.size(); ++j)
        CHECK(v2[0].q.q[j] >= v1[0].q.q[j] - 1e-15);
    }
  }
  SUBCASE("fast path equals brute force") {
    Rng rng(36);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      std::size_t classes = 3 + rng.below(3);
      std::size_t n = 4 + rng.below(12);
      Matrix scores = random_prob_matrix(rng, n, classes);
      std::vector<int> labels(n);
      for (auto& y : labels)
        y = static_cast<int>(rng.below(classes));
      std::set<int> critical{0};
      if (classes > 3 && rng.below(2) == 0) critical.insert(1);
      double delta = rng.uniform(0.0, 0.2);
      auto fast = multiclass_q_v2(scores, labels, critical, delta);
      auto slow = multiclass_q_bruteforce(scores, labels, critical, delta, true);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t c = 0; c < fast.size(); ++c)
        for (std::size_t j = 0; j < fast[c].q.q.size(); ++j)
          worst = std::max(worst,
                           std::abs(fast[c].q.q[j] - slow[c].q.q[j]));
    }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("labels outside the class range are rejected") {
    Matrix scores(2, 2);
    CHECK_THROWS_AS(multiclass_q_v1(scores, {0, 2}, {0}, 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("grouped hinge variants") {
  SUBCASE("separated scores vanish under all groupings") {
    GroupedHinges g = variant_penalties({0.9, 0.8}, {0.1, 0.2}, 0.0);
    CHECK(g.per_positive_sq == 0.0);
    CHECK(g.per_negative_sq == 0.0);
    CHECK(g.per_pair_sq == 0.0);
    CHECK(g.hinge_mass == 0.0);
  }
  SUBCASE("hinge mass is grouping independent") {
    Rng rng(40);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> pos, neg;
      for (int i = 0; i < 6; ++i) pos.push_back(rng.uniform());
      for (int i = 0; i < 9; ++i) neg.push_back(rng.uniform());
      double delta = rng.uniform(0.0, 0.3);
      GroupedHinges g = variant_penalties(pos, neg, delta);
      QVector q = q_values(pos, neg, delta);
      CHECK(std::abs(g.hinge_mass - q.sum()) <= 1e-12);
    }
  }
}

TEST_CASE("multiclass penalty gradients match finite differences") {
  GradCheck v1 = check_multiclass_penalty(false, 30, 51);
  CHECK(v1.max_rel_err <= 1e-5);
  GradCheck v2 = check_multiclass_penalty(true, 30, 52);
  CHECK(v2.max_rel_err <= 1e-5);
}

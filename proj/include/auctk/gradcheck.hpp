#pragma once

#include <cstdint>
#include <string>

#include "auctk/losses.hpp"
#include "auctk/train.hpp"

namespace auctk {

// Central finite differences with step 1e-6 against the analytic gradients.
// Relative error uses a small floor so that zero-gradient coordinates only
// have to beat the differencing noise.
struct GradCheck {
  double max_rel_err = 0.0;
  std::size_t trials = 0;

  bool pass(double tol = 1e-5) const { return max_rel_err <= tol; }
};

double fd_rel_err(double analytic, double numeric);

// dLoss/dOutputs of loss_and_gradient, differenced on the outputs.
GradCheck check_loss_output_gradient(LossKind kind, int trials,
                                     std::uint64_t seed);

// Loss through a random ReLU network, differenced on every parameter.
GradCheck check_net_gradient(LossKind kind, int trials, std::uint64_t seed);

// F + the pairwise-hinge penalty for a binary network (the augmented
// training loss), differenced on every parameter.
GradCheck check_augmented_binary(int trials, std::uint64_t seed,
                                 PenaltyMode mode = PenaltyMode::alm);

// Multi-class penalty (first or both hinge families), differenced on the
// score matrix it consumes.
GradCheck check_multiclass_penalty(bool second_term, int trials,
                                   std::uint64_t seed);

}  // namespace auctk

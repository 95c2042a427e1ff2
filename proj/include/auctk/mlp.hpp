#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auctk/matrix.hpp"

namespace auctk {

enum class Activation { relu, identity };

// Output head: sigmoid squashes a single score into (0,1) for binary tasks;
// identity keeps raw logits (one per class) for multi-class tasks.
enum class HeadKind { sigmoid, identity_logits };

struct Layer {
  Matrix w;               // out x in
  std::vector<double> b;  // out
  Activation act = Activation::relu;
};

// Per-parameter gradient accumulators, same shapes as the network.
struct GradientBuffer {
  std::vector<Matrix> dw;
  std::vector<std::vector<double>> db;

  void zero();
  bool finite() const;
  void scale(double s);
  void add(const GradientBuffer& other, double s = 1.0);
};

// Cached intermediates of one forward pass, consumed by backward().
struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> preact;  // per layer, before activation
  Matrix output;               // post-head
  bool valid = false;
};

// Small dense feed-forward network. Single writer during training;
// const evaluation is safe to share across threads.
class Mlp {
 public:
  Mlp() = default;

  // dims = {in, h1, ..., out}; hidden layers ReLU, last layer identity.
  static Mlp make(const std::vector<std::size_t>& dims, HeadKind head,
                  std::uint64_t seed);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  HeadKind head() const { return head_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  // Post-head outputs: sigmoid head gives probabilities in (0,1),
  // identity head gives raw logits.
  Matrix forward(const Matrix& batch) const;

  // Pre-head outputs (logits), used for logit-space ensembling.
  Matrix forward_logits(const Matrix& batch) const;

  ForwardTrace forward_trace(const Matrix& batch) const;

  // upstream holds dLoss/dOutput for the post-head outputs of `trace`.
  GradientBuffer backward(const ForwardTrace& trace,
                          const Matrix& upstream) const;

  GradientBuffer zero_gradients() const;

  std::size_t parameter_count() const;
  std::vector<double> flatten_parameters() const;
  void unflatten_parameters(const std::vector<double>& flat);

  bool finite() const;

  std::string to_checkpoint_json() const;
  static Mlp from_checkpoint_json(const std::string& text);
  void save_checkpoint(const std::string& path) const;
  static Mlp load_checkpoint(const std::string& path);

 private:
  std::vector<Layer> layers_;
  HeadKind head_ = HeadKind::sigmoid;
  std::uint64_t seed_ = 0;
};

// theta' = theta - lr * g, elementwise. Throws if the result is non-finite.
void sgd_step(Mlp& mlp, const GradientBuffer& grads, double learning_rate);

// Adam moment buffers for the optional adaptive step.
struct AdamState {
  GradientBuffer m;
  GradientBuffer v;
  long step = 0;
};

void adam_step(Mlp& mlp, const GradientBuffer& grads, AdamState& state,
               double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

double sigmoid(double z);

}  // namespace auctk

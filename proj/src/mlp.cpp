#include "auctk/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "auctk/rng.hpp"
#include "json.hpp"

namespace auctk {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

void GradientBuffer::zero() {
  for (auto& m : dw) m.fill(0.0);
  for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
}

bool GradientBuffer::finite() const {
  for (const auto& m : dw)
    for (double x : m.data())
      if (!std::isfinite(x)) return false;
  for (const auto& v : db)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

void GradientBuffer::scale(double s) {
  for (auto& m : dw)
    for (double& x : m.data()) x *= s;
  for (auto& v : db)
    for (double& x : v) x *= s;
}

void GradientBuffer::add(const GradientBuffer& other, double s) {
  for (std::size_t l = 0; l < dw.size(); ++l) {
    for (std::size_t i = 0; i < dw[l].data().size(); ++i)
      dw[l].data()[i] += s * other.dw[l].data()[i];
    for (std::size_t i = 0; i < db[l].size(); ++i)
      db[l][i] += s * other.db[l][i];
  }
}

Mlp Mlp::make(const std::vector<std::size_t>& dims, HeadKind head,
              std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("mlp needs >= 2 dims");
  Mlp mlp;
  mlp.head_ = head;
  mlp.seed_ = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    std::size_t in = dims[l], out = dims[l + 1];
    layer.w = Matrix(out, in);
    layer.b.assign(out, 0.0);
    double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t r = 0; r < out; ++r)
      for (std::size_t c = 0; c < in; ++c)
        layer.w(r, c) = rng.uniform(-bound, bound);
    layer.act =
        (l + 2 == dims.size()) ? Activation::identity : Activation::relu;
    mlp.layers_.push_back(std::move(layer));
  }
  return mlp;
}

std::size_t Mlp::input_dim() const {
  if (layers_.empty()) return 0;
  return layers_.front().w.cols();
}

std::size_t Mlp::output_dim() const {
  if (layers_.empty()) return 0;
  return layers_.back().w.rows();
}

namespace {

// out = x * W^T + b, one row per sample.
Matrix affine(const Matrix& x, const Layer& layer) {
  const std::size_t b_rows = x.rows();
  const std::size_t in = layer.w.cols();
  const std::size_t out = layer.w.rows();
  if (x.cols() != in)
    throw std::invalid_argument("dimension mismatch: batch has " +
                                std::to_string(x.cols()) +
                                " features, layer expects " +
                                std::to_string(in));
  Matrix y(b_rows, out);
  for (std::size_t r = 0; r < b_rows; ++r) {
    const double* xr = x.row(r);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = layer.b[o];
      const double* wr = layer.w.row(o);
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      y(r, o) = acc;
    }
  }
  return y;
}

Matrix activate(const Matrix& z, Activation act) {
  if (act == Activation::identity) return z;
  Matrix a = z;
  for (double& v : a.data()) v = v > 0.0 ? v : 0.0;
  return a;
}

}  // namespace

Matrix Mlp::forward_logits(const Matrix& batch) const {
  Matrix cur = batch;
  for (const auto& layer : layers_) {
    cur = activate(affine(cur, layer), layer.act);
  }
  return cur;
}

Matrix Mlp::forward(const Matrix& batch) const {
  Matrix out = forward_logits(batch);
  if (head_ == HeadKind::sigmoid) {
    for (double& v : out.data()) v = sigmoid(v);
  }
  return out;
}

ForwardTrace Mlp::forward_trace(const Matrix& batch) const {
  ForwardTrace t;
  t.input = batch;
  Matrix cur = batch;
  for (const auto& layer : layers_) {
    Matrix z = affine(cur, layer);
    t.preact.push_back(z);
    cur = activate(z, layer.act);
  }
  if (head_ == HeadKind::sigmoid) {
    for (double& v : cur.data()) v = sigmoid(v);
  }
  t.output = cur;
  t.valid = true;
  return t;
}

GradientBuffer Mlp::zero_gradients() const {
  GradientBuffer g;
  for (const auto& layer : layers_) {
    g.dw.emplace_back(layer.w.rows(), layer.w.cols());
    g.db.emplace_back(layer.b.size(), 0.0);
  }
  return g;
}

GradientBuffer Mlp::backward(const ForwardTrace& trace,
                             const Matrix& upstream) const {
  if (!trace.valid)
    throw std::logic_error("backward called without a forward trace");
  if (!upstream.same_shape(trace.output))
    throw std::invalid_argument("upstream gradient shape mismatch");

  GradientBuffer g = zero_gradients();
  const std::size_t b_rows = trace.input.rows();

  // Gradient w.r.t. the current layer's post-activation output; start from
  // the post-head gradient and chain the head.
  Matrix delta = upstream;
  if (head_ == HeadKind::sigmoid) {
    for (std::size_t i = 0; i < delta.data().size(); ++i) {
      double p = trace.output.data()[i];
      delta.data()[i] *= p * (1.0 - p);
    }
  }

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const Matrix& z = trace.preact[l];
    // through the activation
    if (layer.act == Activation::relu) {
      for (std::size_t i = 0; i < delta.data().size(); ++i)
        if (z.data()[i] <= 0.0) delta.data()[i] = 0.0;
    }
    const Matrix& x =
        (l == 0) ? trace.input : activate(trace.preact[l - 1], layers_[l - 1].act);
    // accumulate dW, db; propagate to the previous layer
    for (std::size_t r = 0; r < b_rows; ++r) {
      const double* dr = delta.row(r);
      const double* xr = x.row(r);
      for (std::size_t o = 0; o < layer.w.rows(); ++o) {
        g.db[l][o] += dr[o];
        double* gw = g.dw[l].row(o);
        for (std::size_t i = 0; i < layer.w.cols(); ++i)
          gw[i] += dr[o] * xr[i];
      }
    }
    if (l > 0) {
      Matrix prev(b_rows, layer.w.cols());
      for (std::size_t r = 0; r < b_rows; ++r) {
        const double* dr = delta.row(r);
        double* pr = prev.row(r);
        for (std::size_t o = 0; o < layer.w.rows(); ++o) {
          const double* wr = layer.w.row(o);
          for (std::size_t i = 0; i < layer.w.cols(); ++i)
            pr[i] += dr[o] * wr[i];
        }
      }
      delta = std::move(prev);
    }
  }
  return g;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_)
    n += layer.w.data().size() + layer.b.size();
  return n;
}

std::vector<double> Mlp::flatten_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.w.data().begin(), layer.w.data().end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

void Mlp::unflatten_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("parameter count mismatch");
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (double& v : layer.w.data()) v = flat[k++];
    for (double& v : layer.b) v = flat[k++];
  }
}

bool Mlp::finite() const {
  for (const auto& layer : layers_) {
    for (double v : layer.w.data())
      if (!std::isfinite(v)) return false;
    for (double v : layer.b)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Mlp::to_checkpoint_json() const {
  nlohmann::json j;
  std::vector<std::size_t> dims;
  std::vector<std::string> acts;
  if (!layers_.empty()) {
    dims.push_back(layers_.front().w.cols());
    for (const auto& layer : layers_) {
      dims.push_back(layer.w.rows());
      acts.push_back(layer.act == Activation::relu ? "relu" : "identity");
    }
  }
  j["dims"] = dims;
  j["activations"] = acts;
  j["head"] = head_ == HeadKind::sigmoid ? "sigmoid" : "identity_logits";
  j["seed"] = seed_;
  j["params"] = flatten_parameters();
  return j.dump();
}

Mlp Mlp::from_checkpoint_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<std::size_t> dims = j.at("dims").get<std::vector<std::size_t>>();
  std::vector<std::string> acts =
      j.at("activations").get<std::vector<std::string>>();
  Mlp mlp;
  mlp.head_ = j.at("head").get<std::string>() == "sigmoid"
                  ? HeadKind::sigmoid
                  : HeadKind::identity_logits;
  mlp.seed_ = j.at("seed").get<std::uint64_t>();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.w = Matrix(dims[l + 1], dims[l]);
    layer.b.assign(dims[l + 1], 0.0);
    layer.act = acts.at(l) == "relu" ? Activation::relu : Activation::identity;
    mlp.layers_.push_back(std::move(layer));
  }
  mlp.unflatten_parameters(j.at("params").get<std::vector<double>>());
  return mlp;
}

void Mlp::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << to_checkpoint_json();
}

Mlp Mlp::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_checkpoint_json(ss.str());
}

void sgd_step(Mlp& mlp, const GradientBuffer& grads, double learning_rate) {
  auto& layers = mlp.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t i = 0; i < layers[l].w.data().size(); ++i)
      layers[l].w.data()[i] -= learning_rate * grads.dw[l].data()[i];
    for (std::size_t i = 0; i < layers[l].b.size(); ++i)
      layers[l].b[i] -= learning_rate * grads.db[l][i];
  }
  if (!mlp.finite())
    throw std::runtime_error("non-finite parameter after sgd step");
}

void adam_step(Mlp& mlp, const GradientBuffer& grads, AdamState& state,
               double learning_rate, double beta1, double beta2, double eps) {
  if (state.m.dw.empty()) {
    state.m = mlp.zero_gradients();
    state.v = mlp.zero_gradients();
  }
  state.step += 1;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  auto& layers = mlp.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto update = [&](double& theta, double g, double& m, double& v) {
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g * g;
      theta -= learning_rate * (m / bc1) / (std::sqrt(v / bc2) + eps);
    };
    for (std::size_t i = 0; i < layers[l].w.data().size(); ++i)
      update(layers[l].w.data()[i], grads.dw[l].data()[i],
             state.m.dw[l].data()[i], state.v.dw[l].data()[i]);
    for (std::size_t i = 0; i < layers[l].b.size(); ++i)
      update(layers[l].b[i], grads.db[l][i], state.m.db[l][i],
             state.v.db[l][i]);
  }
  if (!mlp.finite())
    throw std::runtime_error("non-finite parameter after adam step");
}

}  // namespace auctk

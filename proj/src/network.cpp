#include "ceids/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ceids/errors.hpp"

namespace ceids {

namespace {

constexpr double kLogEps = 1e-12;

void check_arity(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorKind::ArityMismatch, std::string(what) + ": got " + std::to_string(got) +
                                       ", expected " + std::to_string(want));
  }
}

// Scratch buffers reused across samples within one training run.
struct Workspace {
  std::vector<std::vector<double>> activations;  // one per layer, input first
  std::vector<std::vector<double>> deltas;       // one per non-input layer

  explicit Workspace(const NetworkParams& net) {
    activations.reserve(net.layer_sizes.size());
    for (std::size_t s : net.layer_sizes) activations.emplace_back(s, 0.0);
    deltas.reserve(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      deltas.emplace_back(net.layer_sizes[l + 1], 0.0);
    }
  }
};

void forward_into(const NetworkParams& net, std::span<const double> input, Workspace& ws) {
  std::copy(input.begin(), input.end(), ws.activations[0].begin());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    const auto& prev = ws.activations[l];
    auto& out = ws.activations[l + 1];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double* wrow = &layer.weights(i, 0);
      double z = layer.bias[i];
      for (std::size_t j = 0; j < prev.size(); ++j) z += wrow[j] * prev[j];
      out[i] = apply_activation(layer.activation, z);
    }
  }
}

// dL/da at the output layer for one sample.
void output_loss_gradient(std::span<const double> pred, std::span<const double> target,
                          LossKind kind, std::span<double> out) {
  switch (kind) {
    case LossKind::MeanSquareError:
      for (std::size_t i = 0; i < pred.size(); ++i) out[i] = 2.0 * (pred[i] - target[i]);
      break;
    case LossKind::CategoricalCrossEntropy:
      // Gradient of -sum t*log(clamp(a)); zero where the clamp is active so
      // it agrees with finite differences of the clamped loss.
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] <= kLogEps || pred[i] >= 1.0 - kLogEps) {
          out[i] = 0.0;
        } else {
          out[i] = -target[i] / pred[i];
        }
      }
      break;
  }
}

// Accumulates one sample's parameter gradients into grads (unnormalized).
void backward_sample(const NetworkParams& net, std::span<const double> target, LossKind kind,
                     Workspace& ws, Gradients& grads) {
  const std::size_t last = net.layers.size() - 1;
  const auto& output = ws.activations[last + 1];
  check_arity(target.size(), output.size(), "target arity");

  output_loss_gradient(output, target, kind, ws.deltas[last]);
  for (std::size_t i = 0; i < output.size(); ++i) {
    ws.deltas[last][i] *= activation_derivative(net.layers[last].activation, output[i]);
  }

  for (std::size_t l = last; l-- > 0;) {
    const Layer& next = net.layers[l + 1];
    const auto& act = ws.activations[l + 1];
    auto& delta = ws.deltas[l];
    for (std::size_t j = 0; j < delta.size(); ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < ws.deltas[l + 1].size(); ++i) {
        sum += next.weights(i, j) * ws.deltas[l + 1][i];
      }
      delta[j] = sum * activation_derivative(net.layers[l].activation, act[j]);
    }
  }

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& prev = ws.activations[l];
    const auto& delta = ws.deltas[l];
    Matrix& gw = grads.weights[l];
    auto& gb = grads.bias[l];
    for (std::size_t i = 0; i < delta.size(); ++i) {
      double* grow = &gw(i, 0);
      const double d = delta[i];
      for (std::size_t j = 0; j < prev.size(); ++j) grow[j] += d * prev[j];
      gb[i] += d;
    }
  }
}

Gradients make_zero_gradients(const NetworkParams& net) {
  Gradients g;
  g.weights.reserve(net.layers.size());
  g.bias.reserve(net.layers.size());
  for (const Layer& layer : net.layers) {
    g.weights.emplace_back(layer.weights.rows(), layer.weights.cols());
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

void zero_gradients(Gradients& g) {
  for (auto& m : g.weights) m.fill(0.0);
  for (auto& b : g.bias) std::fill(b.begin(), b.end(), 0.0);
}

void scale_gradients(Gradients& g, double factor) {
  for (auto& m : g.weights) {
    for (double& v : m.data()) v *= factor;
  }
  for (auto& b : g.bias) {
    for (double& v : b) v *= factor;
  }
}

}  // namespace

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

double activation_derivative(Activation act, double value) {
  switch (act) {
    case Activation::Sigmoid: return value * (1.0 - value);
    case Activation::Relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - value * value;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

NetworkParams init_network(const std::vector<std::size_t>& layer_sizes,
                           const std::vector<Activation>& activations, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    fail(ErrorKind::BadTopology, "need at least an input and an output layer");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) fail(ErrorKind::BadTopology, "layer sizes must be positive");
  }
  if (activations.size() != layer_sizes.size() - 1) {
    fail(ErrorKind::BadTopology, "expected one activation per non-input layer");
  }

  std::mt19937_64 rng(seed);
  NetworkParams net;
  net.layer_sizes = layer_sizes;
  net.layers.reserve(layer_sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Layer layer;
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.weights = Matrix(fan_out, fan_in);
    for (double& w : layer.weights.data()) w = dist(rng);
    layer.bias.assign(fan_out, 0.0);
    layer.activation = activations[l];
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::vector<std::vector<double>> forward(const NetworkParams& net, std::span<const double> input) {
  check_arity(input.size(), net.input_size(), "input arity");
  Workspace ws(net);
  forward_into(net, input, ws);
  return std::move(ws.activations);
}

std::vector<double> predict_proba(const NetworkParams& net, std::span<const double> input) {
  check_arity(input.size(), net.input_size(), "input arity");
  Workspace ws(net);
  forward_into(net, input, ws);
  return std::move(ws.activations.back());
}

double loss(std::span<const double> pred, std::span<const double> target, LossKind kind) {
  check_arity(pred.size(), target.size(), "loss arity");
  double total = 0.0;
  switch (kind) {
    case LossKind::MeanSquareError:
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = target[i] - pred[i];
        total += e * e;
      }
      break;
    case LossKind::CategoricalCrossEntropy:
      for (std::size_t i = 0; i < pred.size(); ++i) {
        total -= target[i] * std::log(std::clamp(pred[i], kLogEps, 1.0 - kLogEps));
      }
      break;
  }
  return total;
}

Gradients backward(const NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                   LossKind kind) {
  if (inputs.rows() == 0) fail(ErrorKind::EmptyDataset, "backward on empty batch");
  check_arity(inputs.cols(), net.input_size(), "input arity");
  check_arity(targets.cols(), net.output_size(), "target arity");
  check_arity(targets.rows(), inputs.rows(), "batch size");

  Workspace ws(net);
  Gradients grads = make_zero_gradients(net);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    forward_into(net, inputs.row(r), ws);
    backward_sample(net, targets.row(r), kind, ws, grads);
  }
  scale_gradients(grads, 1.0 / static_cast<double>(inputs.rows()));
  return grads;
}

std::vector<double> train(NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                          const TrainConfig& cfg) {
  std::vector<std::size_t> rows(inputs.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return train_indexed(net, inputs, targets, rows, cfg);
}

std::vector<double> train_indexed(NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                                  std::span<const std::size_t> rows, const TrainConfig& cfg) {
  if (rows.empty()) fail(ErrorKind::EmptyDataset, "train on empty dataset");
  if (cfg.batch_size == 0) fail(ErrorKind::BadConfig, "batch_size must be >= 1");
  if (cfg.learning_rate <= 0.0) fail(ErrorKind::BadConfig, "learning_rate must be positive");
  check_arity(inputs.cols(), net.input_size(), "input arity");
  check_arity(targets.cols(), net.output_size(), "target arity");

  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::mt19937_64 rng(cfg.seed);
  Workspace ws(net);
  Gradients grads = make_zero_gradients(net);
  std::vector<double> history;
  history.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      zero_gradients(grads);
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t r = order[start + b];
        forward_into(net, inputs.row(r), ws);
        epoch_loss += loss(ws.activations.back(), targets.row(r), cfg.loss);
        backward_sample(net, targets.row(r), cfg.loss, ws, grads);
      }
      const double step = cfg.learning_rate / static_cast<double>(count);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& w = net.layers[l].weights.data();
        const auto& gw = grads.weights[l].data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * gw[i];
        auto& b = net.layers[l].bias;
        const auto& gb = grads.bias[l];
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= step * gb[i];
      }
    }
    history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return history;
}

}  // namespace ceids

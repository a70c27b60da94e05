#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ceids/core.hpp"

namespace ceids {

enum class Activation : std::uint8_t { Sigmoid = 0, Relu = 1, Tanh = 2, Identity = 3 };
enum class LossKind : std::uint8_t { MeanSquareError = 0, CategoricalCrossEntropy = 1 };

double apply_activation(Activation act, double z);
// Derivative expressed through the activation value itself (all four kinds
// admit this form), which lets backprop avoid storing pre-activations.
double activation_derivative(Activation act, double value);

struct Layer {
  Matrix weights;            // fan_out x fan_in
  std::vector<double> bias;  // fan_out
  Activation activation = Activation::Sigmoid;

  bool operator==(const Layer&) const = default;
};

struct NetworkParams {
  std::vector<std::size_t> layer_sizes;  // input size first
  std::vector<Layer> layers;             // layer_sizes.size() - 1 entries

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }

  bool operator==(const NetworkParams&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 0;
  std::size_t batch_size = 1;
  LossKind loss = LossKind::MeanSquareError;
  std::uint64_t seed = 0;
};

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
NetworkParams init_network(const std::vector<std::size_t>& layer_sizes,
                           const std::vector<Activation>& activations, std::uint64_t seed);

// Per-layer activations; front() is the input, back() the network output.
std::vector<std::vector<double>> forward(const NetworkParams& net, std::span<const double> input);

std::vector<double> predict_proba(const NetworkParams& net, std::span<const double> input);

// MeanSquareError is the summed squared error over outputs; cross-entropy
// clamps predictions to [eps, 1-eps] with eps = 1e-12 before the log.
double loss(std::span<const double> pred, std::span<const double> target, LossKind kind);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> bias;
};

// Gradient of the mean per-sample loss over the batch (matrix rows).
Gradients backward(const NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                   LossKind kind);

// Mini-batch SGD; data reshuffled every epoch, the last partial batch is
// trained. Returns the per-epoch mean training loss.
std::vector<double> train(NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                          const TrainConfig& cfg);
std::vector<double> train_indexed(NetworkParams& net, const Matrix& inputs, const Matrix& targets,
                                  std::span<const std::size_t> rows, const TrainConfig& cfg);

}  // namespace ceids

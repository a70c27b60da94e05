#pragma once

#include <vector>

#include "ceids/core.hpp"
#include "ceids/dataset.hpp"
#include "ceids/network.hpp"

namespace ceids {

inline constexpr std::size_t kEncodedDim = 25;

// Undercomplete autoencoder with a single sigmoid bottleneck. Trained as one
// input -> bottleneck -> input network, then split; encode() runs only the
// first half.
struct AutoencoderModel {
  NetworkParams encoder;  // input_dim -> code_dim
  NetworkParams decoder;  // code_dim -> input_dim
  std::vector<double> loss_history;

  std::size_t input_dim() const { return encoder.input_size(); }
  std::size_t code_dim() const { return encoder.output_size(); }

  bool operator==(const AutoencoderModel&) const = default;
};

// Inputs must be min-max scaled (entries in [0, 1]). cfg.loss is ignored;
// reconstruction always trains under summed squared error.
AutoencoderModel train_autoencoder(const Matrix& train, const TrainConfig& cfg,
                                   std::size_t input_dim = kNumFeatures,
                                   std::size_t code_dim = kEncodedDim);

std::vector<double> encode(const AutoencoderModel& model, std::span<const double> v);
std::vector<double> reconstruct(const AutoencoderModel& model, std::span<const double> v);

Matrix encode_rows(const AutoencoderModel& model, const Matrix& rows);

// Mean squared reconstruction error per sample per dimension.
double reconstruction_mse(const AutoencoderModel& model, const Matrix& rows);

}  // namespace ceids

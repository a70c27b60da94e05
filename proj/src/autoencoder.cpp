#include "ceids/autoencoder.hpp"

#include "ceids/errors.hpp"

namespace ceids {

namespace {

// The bottleneck split is exact: encoder gets layer 0, decoder gets layer 1
// of the trained full network.
AutoencoderModel split(NetworkParams full, std::vector<double> history) {
  AutoencoderModel model;
  model.encoder.layer_sizes = {full.layer_sizes[0], full.layer_sizes[1]};
  model.encoder.layers.push_back(full.layers[0]);
  model.decoder.layer_sizes = {full.layer_sizes[1], full.layer_sizes[2]};
  model.decoder.layers.push_back(full.layers[1]);
  model.loss_history = std::move(history);
  return model;
}

}  // namespace

AutoencoderModel train_autoencoder(const Matrix& train, const TrainConfig& cfg,
                                   std::size_t input_dim, std::size_t code_dim) {
  if (train.rows() == 0) fail(ErrorKind::EmptyDataset, "autoencoder needs training data");
  if (train.cols() != input_dim) {
    fail(ErrorKind::ArityMismatch, "autoencoder input arity " + std::to_string(train.cols()) +
                                       ", expected " + std::to_string(input_dim));
  }
  if (code_dim >= input_dim) {
    fail(ErrorKind::BadTopology, "bottleneck must be narrower than the input");
  }

  NetworkParams full = init_network({input_dim, code_dim, input_dim},
                                    {Activation::Sigmoid, Activation::Sigmoid}, cfg.seed);
  TrainConfig effective = cfg;
  effective.loss = LossKind::MeanSquareError;
  std::vector<double> history = ceids::train(full, train, train, effective);
  return split(std::move(full), std::move(history));
}

std::vector<double> encode(const AutoencoderModel& model, std::span<const double> v) {
  return predict_proba(model.encoder, v);
}

std::vector<double> reconstruct(const AutoencoderModel& model, std::span<const double> v) {
  return predict_proba(model.decoder, predict_proba(model.encoder, v));
}

Matrix encode_rows(const AutoencoderModel& model, const Matrix& rows) {
  Matrix out(rows.rows(), model.code_dim());
  parallel_for(rows.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto code = encode(model, rows.row(r));
      std::copy(code.begin(), code.end(), out.row(r).begin());
    }
  });
  return out;
}

double reconstruction_mse(const AutoencoderModel& model, const Matrix& rows) {
  if (rows.rows() == 0) fail(ErrorKind::EmptyDataset, "reconstruction_mse on empty data");
  double total = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto rec = reconstruct(model, rows.row(r));
    total += squared_distance(rec, rows.row(r));
  }
  return total / static_cast<double>(rows.rows() * rows.cols());
}

}  // namespace ceids

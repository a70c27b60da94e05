#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ceids/network.hpp"
#include "ceids/svm.hpp"

namespace ceids {

// The two per-cluster network recipes: a deep all-sigmoid net under summed
// squared error, and a shallower relu net with a sigmoid output under
// cross-entropy.
enum class DnnProfileKind : std::uint8_t { DeepSigmoidMse = 0, ReluCrossentropy = 1 };

const char* dnn_profile_name(DnnProfileKind kind);

// Fully expanded network recipe for one cluster.
struct DnnSpec {
  std::vector<std::size_t> layer_sizes;
  std::vector<Activation> activations;
  LossKind loss = LossKind::MeanSquareError;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
};

struct PipelineConfig {
  bool oversample = true;
  std::size_t train_subsample = 0;  // 0 = use every training record

  double ae_learning_rate = 0.05;
  std::size_t ae_epochs = 20;
  std::size_t ae_batch_size = 128;

  double ms_bandwidth = 0.0;  // 0 = estimate from the data
  std::size_t ms_subsample = 5000;
  double ms_tol = 1e-4;
  int ms_max_iter = 300;

  DnnProfileKind dnn_profile = DnnProfileKind::DeepSigmoidMse;
  std::map<std::size_t, DnnProfileKind> cluster_dnn_profile;  // per-cluster override
  double dnn_learning_rate = 0.01;
  std::size_t dnn_epochs = 0;      // 0 = profile default
  std::size_t dnn_batch_size = 0;  // 0 = profile default

  double svm_cost = 1.0;
  std::size_t svm_epochs = 20;
  double svm_learning_rate = 0.1;

  double final_learning_rate = 0.01;
  std::size_t final_epochs = 30;
  std::size_t final_batch_size = 512;

  std::size_t cv_folds = 10;
  std::size_t tiny_cluster_min = 10;

  std::uint64_t seed = 0;

  bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig default_config();

// Flat "key = value" text, '#' comments. Unknown keys and out-of-range
// values are hard errors.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);
void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Every key with its resolved value, suitable for run logs and for feeding
// back through parse_config_text.
std::string resolved_text(const PipelineConfig& cfg);

DnnSpec dnn_spec_for(DnnProfileKind kind, std::size_t input_dim, const PipelineConfig& cfg);
DnnProfileKind profile_for_cluster(const PipelineConfig& cfg, std::size_t cluster_index);

SvmTrainConfig svm_config(const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace ceids

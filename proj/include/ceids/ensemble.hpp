#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ceids/autoencoder.hpp"
#include "ceids/config.hpp"
#include "ceids/core.hpp"
#include "ceids/dataset.hpp"
#include "ceids/meanshift.hpp"
#include "ceids/network.hpp"
#include "ceids/preprocess.hpp"
#include "ceids/svm.hpp"

namespace ceids {

enum class ModelKind : std::uint8_t { Dnn = 0, Svm = 1 };

const char* model_kind_name(ModelKind kind);

struct SelectionRecord {
  double dnn_accuracy = 0.0;
  double svm_accuracy = 0.0;
  // False when the cluster was too small for cross-validation and the
  // models were compared on training accuracy instead.
  bool used_cv = true;

  bool operator==(const SelectionRecord&) const = default;
};

// Ties go to the DNN.
ModelKind select_kind(double dnn_accuracy, double svm_accuracy);

// The winning learner for one cluster; only the member matching `kind`
// holds a trained model.
struct ClusterModel {
  ModelKind kind = ModelKind::Dnn;
  NetworkParams dnn;
  SvmModel svm;
  SelectionRecord selection;

  bool operator==(const ClusterModel&) const = default;
};

std::array<double, kNumClasses> score_cluster_model(const ClusterModel& model,
                                                    std::span<const double> x);

struct EnsembleModel {
  NominalEncoder encoder;
  MinMaxScaler scaler;
  AutoencoderModel autoencoder;
  MeanShiftModel meanshift;
  std::vector<ClusterModel> clusters;
  NetworkParams final_net;  // K*5 -> 5, tanh
  PipelineConfig config;    // snapshot, seed included
  std::uint32_t format_version = 1;

  std::size_t cluster_count() const { return clusters.size(); }

  bool operator==(const EnsembleModel&) const = default;
};

// Row indices per cluster, by nearest mode. Subsets may be empty.
std::vector<std::vector<std::size_t>> partition(const Matrix& codes, const MeanShiftModel& ms);

// Trains a DNN and a one-vs-rest SVM on the subset, scores both by k-fold
// cross-validation (or training accuracy for tiny subsets), and keeps the
// more accurate one.
ClusterModel train_cluster_pair(const Matrix& codes, const std::vector<ClassLabel>& labels,
                                std::span<const std::size_t> rows, const PipelineConfig& cfg,
                                std::size_t cluster_index, std::uint64_t seed);

// Membership-weighted block matrix: row r holds the assigned cluster's
// 5-dim score in block assign(r), zeros elsewhere. Width is K*5.
Matrix aggregate(const std::vector<ClusterModel>& models, const MeanShiftModel& ms,
                 const Matrix& codes);

NetworkParams train_final(const Matrix& augmented, const std::vector<ClassLabel>& labels,
                          const PipelineConfig& cfg, std::uint64_t seed,
                          std::vector<double>* loss_history = nullptr);

using LogFn = std::function<void(const std::string&)>;

// encode -> scale -> oversample -> autoencoder -> mean-shift -> per-cluster
// selection -> aggregation -> final network. Deterministic under seed.
EnsembleModel train_pipeline(const std::vector<LabeledRecord>& train, const PipelineConfig& cfg,
                             std::uint64_t seed, const LogFn& log = {});

struct Prediction {
  ClassLabel label = ClassLabel::Normal;
  std::array<double, kNumClasses> scores{};
};

Prediction predict(const EnsembleModel& model, const RawRecord& record);

void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(const std::string& path);

}  // namespace ceids

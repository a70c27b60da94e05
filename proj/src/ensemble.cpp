#include "ceids/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "ceids/errors.hpp"
#include "ceids/eval.hpp"
#include "ceids/serialize.hpp"

namespace ceids {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.kind(), std::string("[") + name + "] " + e.what());
  }
}

void log_line(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

Matrix one_hot_targets(std::span<const ClassLabel> labels) {
  Matrix t(labels.size(), kNumClasses);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    t(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return t;
}

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double dnn_accuracy_on(const NetworkParams& net, const Matrix& inputs,
                       std::span<const ClassLabel> labels, std::span<const std::size_t> rows) {
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    const auto scores = predict_proba(net, inputs.row(r));
    if (argmax(scores) == static_cast<std::size_t>(labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double svm_accuracy_on(const SvmModel& model, const Matrix& inputs,
                       std::span<const ClassLabel> labels, std::span<const std::size_t> rows) {
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    const auto scores = predict_scores(model, inputs.row(r));
    if (argmax(scores) == static_cast<std::size_t>(labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

NetworkParams train_dnn(const Matrix& inputs, const Matrix& targets,
                        std::span<const std::size_t> rows, const DnnSpec& spec,
                        double learning_rate, std::uint64_t seed) {
  NetworkParams net = init_network(spec.layer_sizes, spec.activations, seed);
  TrainConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.epochs = spec.epochs;
  cfg.batch_size = spec.batch_size;
  cfg.loss = spec.loss;
  cfg.seed = derive_seed(seed, "dnn_sgd");
  train_indexed(net, inputs, targets, rows, cfg);
  return net;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

// --- model container payload ---------------------------------------------

void write_network(BinaryWriter& w, const NetworkParams& net) {
  w.write_u64(net.layer_sizes.size());
  for (std::size_t s : net.layer_sizes) w.write_u64(s);
  for (const Layer& layer : net.layers) {
    w.write_u8(static_cast<std::uint8_t>(layer.activation));
    w.write_matrix(layer.weights);
    w.write_f64_span(layer.bias);
  }
}

NetworkParams read_network(BinaryReader& r) {
  NetworkParams net;
  const std::uint64_t n = r.read_u64();
  net.layer_sizes.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) net.layer_sizes.push_back(r.read_u64());
  net.layers.reserve(n > 0 ? n - 1 : 0);
  for (std::uint64_t l = 0; l + 1 < n; ++l) {
    Layer layer;
    layer.activation = static_cast<Activation>(r.read_u8());
    layer.weights = r.read_matrix();
    layer.bias = r.read_f64_vector();
    net.layers.push_back(std::move(layer));
  }
  return net;
}

void write_svm(BinaryWriter& w, const SvmModel& model) {
  for (const SvmBinary& m : model.machines) {
    w.write_u8(m.degenerate ? 1 : 0);
    w.write_f64_span(m.theta);
    w.write_f64(m.theta0);
  }
}

SvmModel read_svm(BinaryReader& r) {
  SvmModel model;
  for (SvmBinary& m : model.machines) {
    m.degenerate = r.read_u8() != 0;
    m.theta = r.read_f64_vector();
    m.theta0 = r.read_f64();
  }
  return model;
}

void write_autoencoder(BinaryWriter& w, const AutoencoderModel& model) {
  write_network(w, model.encoder);
  write_network(w, model.decoder);
  w.write_f64_span(model.loss_history);
}

AutoencoderModel read_autoencoder(BinaryReader& r) {
  AutoencoderModel model;
  model.encoder = read_network(r);
  model.decoder = read_network(r);
  model.loss_history = r.read_f64_vector();
  return model;
}

void write_meanshift(BinaryWriter& w, const MeanShiftModel& model) {
  w.write_f64(model.bandwidth);
  w.write_u64(model.modes.size());
  for (const auto& mode : model.modes) w.write_f64_span(mode);
  w.write_u64(model.fit_subsample_size);
}

MeanShiftModel read_meanshift(BinaryReader& r) {
  MeanShiftModel model;
  model.bandwidth = r.read_f64();
  const std::uint64_t n = r.read_u64();
  model.modes.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) model.modes.push_back(r.read_f64_vector());
  model.fit_subsample_size = r.read_u64();
  return model;
}

void write_cluster(BinaryWriter& w, const ClusterModel& model) {
  w.write_u8(static_cast<std::uint8_t>(model.kind));
  w.write_f64(model.selection.dnn_accuracy);
  w.write_f64(model.selection.svm_accuracy);
  w.write_u8(model.selection.used_cv ? 1 : 0);
  if (model.kind == ModelKind::Dnn) {
    write_network(w, model.dnn);
  } else {
    write_svm(w, model.svm);
  }
}

ClusterModel read_cluster(BinaryReader& r) {
  ClusterModel model;
  model.kind = static_cast<ModelKind>(r.read_u8());
  model.selection.dnn_accuracy = r.read_f64();
  model.selection.svm_accuracy = r.read_f64();
  model.selection.used_cv = r.read_u8() != 0;
  if (model.kind == ModelKind::Dnn) {
    model.dnn = read_network(r);
  } else {
    model.svm = read_svm(r);
  }
  return model;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  return kind == ModelKind::Dnn ? "DNN" : "SVM";
}

ModelKind select_kind(double dnn_accuracy, double svm_accuracy) {
  return svm_accuracy > dnn_accuracy ? ModelKind::Svm : ModelKind::Dnn;
}

std::array<double, kNumClasses> score_cluster_model(const ClusterModel& model,
                                                    std::span<const double> x) {
  if (model.kind == ModelKind::Dnn) {
    const auto out = predict_proba(model.dnn, x);
    std::array<double, kNumClasses> scores{};
    std::copy(out.begin(), out.end(), scores.begin());
    return scores;
  }
  return predict_scores(model.svm, x);
}

std::vector<std::vector<std::size_t>> partition(const Matrix& codes, const MeanShiftModel& ms) {
  if (ms.modes.empty()) fail(ErrorKind::EmptyDataset, "mean-shift model has no modes");
  std::vector<std::size_t> assigned(codes.rows());
  parallel_for(codes.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      assigned[r] = nearest_mode(ms, codes.row(r));
    }
  });
  std::vector<std::vector<std::size_t>> subsets(ms.modes.size());
  for (std::size_t r = 0; r < codes.rows(); ++r) subsets[assigned[r]].push_back(r);
  return subsets;
}

ClusterModel train_cluster_pair(const Matrix& codes, const std::vector<ClassLabel>& labels,
                                std::span<const std::size_t> rows, const PipelineConfig& cfg,
                                std::size_t cluster_index, std::uint64_t seed) {
  ClusterModel model;

  if (rows.empty()) {
    // Nothing to learn from; an all-degenerate SVM scores every class
    // uniformly, so the final network learns to ignore this block.
    for (auto& m : model.svm.machines) {
      m.theta.assign(codes.cols(), 0.0);
      m.degenerate = true;
    }
    model.kind = ModelKind::Svm;
    model.selection.used_cv = false;
    return model;
  }

  const Matrix sub_codes = take_rows(codes, rows);
  std::vector<ClassLabel> sub_labels(rows.size(), ClassLabel::Normal);
  for (std::size_t i = 0; i < rows.size(); ++i) sub_labels[i] = labels[rows[i]];
  const Matrix sub_targets = one_hot_targets(sub_labels);

  const DnnSpec spec = dnn_spec_for(profile_for_cluster(cfg, cluster_index), codes.cols(), cfg);
  const std::set<ClassLabel> distinct(sub_labels.begin(), sub_labels.end());
  const bool can_cv = rows.size() >= cfg.tiny_cluster_min && rows.size() >= cfg.cv_folds &&
                      distinct.size() >= 2;

  if (can_cv) {
    const auto dnn_cv = cross_validate(
        rows.size(), cfg.cv_folds, derive_seed(seed, "dnn_cv"),
        [&](std::span<const std::size_t> train_rows, std::span<const std::size_t> validate_rows,
            std::uint64_t fold_seed) {
          const NetworkParams net = train_dnn(sub_codes, sub_targets, train_rows, spec,
                                              cfg.dnn_learning_rate, fold_seed);
          return dnn_accuracy_on(net, sub_codes, sub_labels, validate_rows);
        });
    const auto svm_cv = cross_validate(
        rows.size(), cfg.cv_folds, derive_seed(seed, "svm_cv"),
        [&](std::span<const std::size_t> train_rows, std::span<const std::size_t> validate_rows,
            std::uint64_t fold_seed) {
          const SvmModel m =
              train_ovr_indexed(sub_codes, sub_labels, train_rows, svm_config(cfg, fold_seed));
          return svm_accuracy_on(m, sub_codes, sub_labels, validate_rows);
        });
    model.selection.dnn_accuracy = dnn_cv.mean_accuracy;
    model.selection.svm_accuracy = svm_cv.mean_accuracy;
    model.selection.used_cv = true;
    model.kind = select_kind(dnn_cv.mean_accuracy, svm_cv.mean_accuracy);
    if (model.kind == ModelKind::Dnn) {
      model.dnn = train_dnn(sub_codes, sub_targets, all_rows(rows.size()), spec,
                            cfg.dnn_learning_rate, derive_seed(seed, "dnn_full"));
    } else {
      model.svm = train_ovr(sub_codes, sub_labels, svm_config(cfg, derive_seed(seed, "svm_full")));
    }
    return model;
  }

  // Tiny-cluster fallback: both models trained on the full subset, compared
  // on training accuracy, flagged via used_cv = false.
  const auto everything = all_rows(rows.size());
  NetworkParams dnn = train_dnn(sub_codes, sub_targets, everything, spec, cfg.dnn_learning_rate,
                                derive_seed(seed, "dnn_full"));
  SvmModel svm = train_ovr(sub_codes, sub_labels, svm_config(cfg, derive_seed(seed, "svm_full")));
  model.selection.dnn_accuracy = dnn_accuracy_on(dnn, sub_codes, sub_labels, everything);
  model.selection.svm_accuracy = svm_accuracy_on(svm, sub_codes, sub_labels, everything);
  model.selection.used_cv = false;
  model.kind = select_kind(model.selection.dnn_accuracy, model.selection.svm_accuracy);
  if (model.kind == ModelKind::Dnn) {
    model.dnn = std::move(dnn);
  } else {
    model.svm = std::move(svm);
  }
  return model;
}

Matrix aggregate(const std::vector<ClusterModel>& models, const MeanShiftModel& ms,
                 const Matrix& codes) {
  if (models.size() != ms.modes.size()) {
    fail(ErrorKind::ArityMismatch, "cluster model count does not match mode count");
  }
  const std::size_t k = models.size();
  Matrix augmented(codes.rows(), k * kNumClasses);
  parallel_for(codes.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      // Hard membership: only the assigned cluster's block can be nonzero,
      // every other block is already zero-initialized.
      const std::size_t cluster = nearest_mode(ms, codes.row(r));
      const auto scores = score_cluster_model(models[cluster], codes.row(r));
      auto row = augmented.row(r);
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        row[cluster * kNumClasses + c] = scores[c];
      }
    }
  });
  return augmented;
}

NetworkParams train_final(const Matrix& augmented, const std::vector<ClassLabel>& labels,
                          const PipelineConfig& cfg, std::uint64_t seed,
                          std::vector<double>* loss_history) {
  if (augmented.rows() != labels.size()) {
    fail(ErrorKind::LengthMismatch, "augmented rows do not match label count");
  }
  if (augmented.cols() % kNumClasses != 0) {
    fail(ErrorKind::ArityMismatch, "augmented width must be a multiple of 5");
  }
  NetworkParams net =
      init_network({augmented.cols(), kNumClasses}, {Activation::Tanh}, seed);
  TrainConfig train_cfg;
  train_cfg.learning_rate = cfg.final_learning_rate;
  train_cfg.epochs = cfg.final_epochs;
  train_cfg.batch_size = cfg.final_batch_size;
  train_cfg.loss = LossKind::MeanSquareError;
  train_cfg.seed = derive_seed(seed, "final_sgd");
  const Matrix targets = one_hot_targets(labels);
  const auto history = train(net, augmented, targets, train_cfg);
  if (loss_history) *loss_history = history;
  return net;
}

EnsembleModel train_pipeline(const std::vector<LabeledRecord>& train_data,
                             const PipelineConfig& cfg, std::uint64_t seed, const LogFn& log) {
  if (train_data.empty()) fail(ErrorKind::EmptyDataset, "training data is empty");

  EnsembleModel model;
  model.config = cfg;
  model.config.seed = seed;
  model.format_version = kFormatVersion;

  // Optional seeded subsample, order-preserving.
  std::vector<std::size_t> selected = all_rows(train_data.size());
  if (cfg.train_subsample > 0 && cfg.train_subsample < train_data.size()) {
    std::mt19937_64 rng(derive_seed(seed, "train_subsample"));
    std::shuffle(selected.begin(), selected.end(), rng);
    selected.resize(cfg.train_subsample);
    std::sort(selected.begin(), selected.end());
    log_line(log, "subsampled training set to " + std::to_string(selected.size()) + " records");
  }

  stage("encode", [&] {
    std::vector<RawRecord> records;
    records.reserve(selected.size());
    for (std::size_t r : selected) records.push_back(train_data[r].record);
    model.encoder = fit_nominal_encoder(records);
  });

  Matrix features(selected.size(), kNumFeatures);
  std::vector<ClassLabel> labels(selected.size(), ClassLabel::Normal);
  stage("encode", [&] {
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const auto v = encode(train_data[selected[i]].record, model.encoder);
      std::copy(v.begin(), v.end(), features.row(i).begin());
      labels[i] = train_data[selected[i]].label;
    }
  });

  stage("scale", [&] {
    model.scaler = fit_minmax(features);
    apply_minmax_rows(features, model.scaler);
  });

  if (cfg.oversample) {
    stage("oversample", [&] {
      oversample(features, labels, derive_seed(seed, "oversample"));
    });
    log_line(log, "oversampled training set to " + std::to_string(features.rows()) + " records");
  }

  stage("autoencoder", [&] {
    TrainConfig ae_cfg;
    ae_cfg.learning_rate = cfg.ae_learning_rate;
    ae_cfg.epochs = cfg.ae_epochs;
    ae_cfg.batch_size = cfg.ae_batch_size;
    ae_cfg.seed = derive_seed(seed, "autoencoder");
    model.autoencoder = train_autoencoder(features, ae_cfg);
  });
  if (!model.autoencoder.loss_history.empty()) {
    log_line(log, "autoencoder final epoch loss " +
                      std::to_string(model.autoencoder.loss_history.back()));
  }

  Matrix codes = stage("autoencoder", [&] { return encode_rows(model.autoencoder, features); });

  stage("meanshift", [&] {
    Matrix sample = codes;
    if (cfg.ms_subsample > 0 && cfg.ms_subsample < codes.rows()) {
      std::vector<std::size_t> order = all_rows(codes.rows());
      std::mt19937_64 rng(derive_seed(seed, "meanshift_sample"));
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(cfg.ms_subsample);
      sample = take_rows(codes, order);
    }
    double bandwidth = cfg.ms_bandwidth;
    if (bandwidth <= 0.0) {
      bandwidth = estimate_bandwidth(sample, derive_seed(seed, "bandwidth"));
      log_line(log, "estimated bandwidth " + std::to_string(bandwidth));
    }
    model.meanshift = fit(sample, bandwidth, cfg.ms_tol, cfg.ms_max_iter);
    model.meanshift.fit_subsample_size = sample.rows();
  });
  log_line(log, "mean-shift found " + std::to_string(model.meanshift.modes.size()) + " clusters");

  const auto subsets = stage("partition", [&] { return partition(codes, model.meanshift); });

  stage("cluster_models", [&] {
    model.clusters.reserve(subsets.size());
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      ClusterModel cluster = train_cluster_pair(codes, labels, subsets[i], cfg, i,
                                                derive_seed(seed, "cluster", i));
      std::ostringstream note;
      note << "cluster " << i << ": " << subsets[i].size() << " records, selected "
           << model_kind_name(cluster.kind) << " (dnn " << cluster.selection.dnn_accuracy
           << ", svm " << cluster.selection.svm_accuracy << ", "
           << (cluster.selection.used_cv ? "cv" : "training-accuracy fallback") << ")";
      log_line(log, note.str());
      model.clusters.push_back(std::move(cluster));
    }
  });

  const Matrix augmented =
      stage("aggregate", [&] { return aggregate(model.clusters, model.meanshift, codes); });

  stage("final", [&] {
    std::vector<double> history;
    model.final_net = train_final(augmented, labels, cfg, derive_seed(seed, "final"), &history);
    if (!history.empty()) {
      log_line(log, "final network last-epoch loss " + std::to_string(history.back()));
    }
  });

  return model;
}

Prediction predict(const EnsembleModel& model, const RawRecord& record) {
  std::vector<double> v = encode(record, model.encoder);
  apply_minmax_inplace(v, model.scaler);
  const std::vector<double> code = encode(model.autoencoder, v);

  const std::size_t cluster = nearest_mode(model.meanshift, code);
  const auto scores = score_cluster_model(model.clusters[cluster], code);

  std::vector<double> augmented_row(model.clusters.size() * kNumClasses, 0.0);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    augmented_row[cluster * kNumClasses + c] = scores[c];
  }

  const std::vector<double> final_scores = predict_proba(model.final_net, augmented_row);
  Prediction p;
  std::copy(final_scores.begin(), final_scores.end(), p.scores.begin());
  p.label = static_cast<ClassLabel>(argmax(p.scores));
  return p;
}

void save_model(const EnsembleModel& model, const std::string& path) {
  BinaryWriter w;
  w.write_u8(static_cast<std::uint8_t>(PayloadKind::EnsembleModel));
  serialize_encoder(w, model.encoder);
  serialize_scaler(w, model.scaler);
  write_autoencoder(w, model.autoencoder);
  write_meanshift(w, model.meanshift);
  w.write_u64(model.clusters.size());
  for (const ClusterModel& cluster : model.clusters) write_cluster(w, cluster);
  write_network(w, model.final_net);
  w.write_string(resolved_text(model.config));
  write_container(path, w.bytes());
}

EnsembleModel load_model(const std::string& path) {
  const auto payload = read_container(path);
  BinaryReader r(payload);
  if (r.read_u8() != static_cast<std::uint8_t>(PayloadKind::EnsembleModel)) {
    fail(ErrorKind::FormatVersion, "container does not hold an ensemble model: " + path);
  }
  EnsembleModel model;
  model.format_version = kFormatVersion;
  model.encoder = deserialize_encoder(r);
  model.scaler = deserialize_scaler(r);
  model.autoencoder = read_autoencoder(r);
  model.meanshift = read_meanshift(r);
  const std::uint64_t k = r.read_u64();
  model.clusters.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) model.clusters.push_back(read_cluster(r));
  model.final_net = read_network(r);
  model.config = parse_config_text(r.read_string());
  return model;
}

}  // namespace ceids

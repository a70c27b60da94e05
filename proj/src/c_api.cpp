#include "ceids.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ceids/autoencoder.hpp"
#include "ceids/config.hpp"
#include "ceids/dataset.hpp"
#include "ceids/ensemble.hpp"
#include "ceids/errors.hpp"
#include "ceids/eval.hpp"
#include "ceids/preprocess.hpp"

using nlohmann::json;

struct ceids_dataset {
  std::vector<ceids::LabeledRecord> records;
};

struct ceids_config {
  ceids::PipelineConfig cfg;
};

struct ceids_model {
  ceids::EnsembleModel model;
};

namespace {

thread_local std::string g_last_error;

ceids_status status_for(ceids::ErrorKind kind) {
  using ceids::ErrorKind;
  switch (kind) {
    case ErrorKind::Io:
      return CEIDS_ERROR_IO;
    case ErrorKind::FieldCount:
    case ErrorKind::NumericParse:
    case ErrorKind::UnknownAttack:
      return CEIDS_ERROR_PARSE;
    case ErrorKind::EmptyDataset:
    case ErrorKind::MissingClass:
    case ErrorKind::DegenerateData:
    case ErrorKind::EmptyNeighborhood:
    case ErrorKind::SingleClass:
    case ErrorKind::TinyCluster:
    case ErrorKind::LengthMismatch:
    case ErrorKind::EmptyInput:
      return CEIDS_ERROR_DATA;
    case ErrorKind::BadTopology:
    case ErrorKind::BadConfig:
    case ErrorKind::BadK:
    case ErrorKind::ConfigParse:
    case ErrorKind::UnknownKey:
    case ErrorKind::Range:
      return CEIDS_ERROR_CONFIG;
    case ErrorKind::FormatVersion:
    case ErrorKind::Checksum:
      return CEIDS_ERROR_FORMAT;
    case ErrorKind::ArityMismatch:
      return CEIDS_ERROR_INVALID_ARGUMENT;
  }
  return CEIDS_ERROR_INTERNAL;
}

template <typename Fn>
ceids_status guarded(Fn&& fn) {
  try {
    fn();
    return CEIDS_OK;
  } catch (const ceids::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CEIDS_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CEIDS_ERROR_INTERNAL;
  }
}

ceids_status invalid_argument(const char* message) {
  g_last_error = message;
  return CEIDS_ERROR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json metrics_json(const ceids::Metrics& m) {
  return json{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
              {"f_score", m.f_score},   {"tpr", m.tpr},             {"fpr", m.fpr},
              {"degenerate", m.degenerate}};
}

}  // namespace

extern "C" {

const char* ceids_version(void) { return "1.0.0"; }

const char* ceids_last_error(void) { return g_last_error.c_str(); }

void ceids_string_free(char* s) { std::free(s); }

const char* ceids_class_name(int label) {
  if (label < 0 || label >= CEIDS_NUM_CLASSES) return "?";
  return ceids::class_name(static_cast<ceids::ClassLabel>(label));
}

ceids_status ceids_dataset_load(const char* path, ceids_dataset** out) {
  if (!path || !out) return invalid_argument("path and out must be non-NULL");
  return guarded([&] {
    auto ds = std::make_unique<ceids_dataset>();
    ds->records = ceids::load_dataset(path);
    *out = ds.release();
  });
}

void ceids_dataset_free(ceids_dataset* ds) { delete ds; }

size_t ceids_dataset_size(const ceids_dataset* ds) { return ds ? ds->records.size() : 0; }

ceids_status ceids_dataset_class_counts(const ceids_dataset* ds,
                                        uint64_t counts[CEIDS_NUM_CLASSES]) {
  if (!ds || !counts) return invalid_argument("dataset and counts must be non-NULL");
  return guarded([&] {
    const auto c = ceids::class_counts(ds->records);
    for (std::size_t i = 0; i < ceids::kNumClasses; ++i) counts[i] = c[i];
  });
}

ceids_status ceids_dataset_summary_json(const ceids_dataset* ds, char** out) {
  if (!ds || !out) return invalid_argument("dataset and out must be non-NULL");
  return guarded([&] {
    const auto c = ceids::class_counts(ds->records);
    json classes;
    for (std::size_t i = 0; i < ceids::kNumClasses; ++i) {
      classes[ceids::class_name(static_cast<ceids::ClassLabel>(i))] = c[i];
    }
    const json summary{{"records", ds->records.size()}, {"classes", classes}};
    *out = dup_string(summary.dump());
  });
}

ceids_status ceids_config_create(ceids_config** out) {
  if (!out) return invalid_argument("out must be non-NULL");
  return guarded([&] { *out = new ceids_config{ceids::default_config()}; });
}

ceids_status ceids_config_load(const char* path, ceids_config** out) {
  if (!path || !out) return invalid_argument("path and out must be non-NULL");
  return guarded([&] { *out = new ceids_config{ceids::load_config(path)}; });
}

ceids_status ceids_config_set(ceids_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid_argument("cfg, key and value must be non-NULL");
  return guarded([&] { ceids::set_config_key(cfg->cfg, key, value); });
}

ceids_status ceids_config_dump(const ceids_config* cfg, char** out) {
  if (!cfg || !out) return invalid_argument("cfg and out must be non-NULL");
  return guarded([&] { *out = dup_string(ceids::resolved_text(cfg->cfg)); });
}

void ceids_config_free(ceids_config* cfg) { delete cfg; }

ceids_status ceids_train(const ceids_dataset* train, const ceids_config* cfg, uint64_t seed,
                         ceids_model** out, char** log_json) {
  if (!train || !cfg || !out) return invalid_argument("train, cfg and out must be non-NULL");
  return guarded([&] {
    json log_lines = json::array();
    ceids::LogFn log = [&](const std::string& line) { log_lines.push_back(line); };
    auto model = std::make_unique<ceids_model>();
    model->model = ceids::train_pipeline(train->records, cfg->cfg, seed, log);
    if (log_json) *log_json = dup_string(log_lines.dump());
    *out = model.release();
  });
}

ceids_status ceids_model_save(const ceids_model* model, const char* path) {
  if (!model || !path) return invalid_argument("model and path must be non-NULL");
  return guarded([&] { ceids::save_model(model->model, path); });
}

ceids_status ceids_model_load(const char* path, ceids_model** out) {
  if (!path || !out) return invalid_argument("path and out must be non-NULL");
  return guarded([&] {
    auto model = std::make_unique<ceids_model>();
    model->model = ceids::load_model(path);
    *out = model.release();
  });
}

void ceids_model_free(ceids_model* model) { delete model; }

size_t ceids_model_cluster_count(const ceids_model* model) {
  return model ? model->model.cluster_count() : 0;
}

ceids_status ceids_model_info_json(const ceids_model* model, char** out) {
  if (!model || !out) return invalid_argument("model and out must be non-NULL");
  return guarded([&] {
    json clusters = json::array();
    for (const auto& cluster : model->model.clusters) {
      clusters.push_back({{"kind", ceids::model_kind_name(cluster.kind)},
                          {"dnn_accuracy", cluster.selection.dnn_accuracy},
                          {"svm_accuracy", cluster.selection.svm_accuracy},
                          {"used_cv", cluster.selection.used_cv}});
    }
    const json info{{"format_version", model->model.format_version},
                    {"clusters", model->model.cluster_count()},
                    {"selection", clusters},
                    {"seed", model->model.config.seed},
                    {"config", ceids::resolved_text(model->model.config)}};
    *out = dup_string(info.dump());
  });
}

ceids_status ceids_predict(const ceids_model* model, const ceids_dataset* ds, size_t index,
                           int* label, double scores[CEIDS_NUM_CLASSES]) {
  if (!model || !ds) return invalid_argument("model and dataset must be non-NULL");
  if (index >= ds->records.size()) return invalid_argument("record index out of range");
  return guarded([&] {
    const auto p = ceids::predict(model->model, ds->records[index].record);
    if (label) *label = static_cast<int>(p.label);
    if (scores) {
      for (std::size_t i = 0; i < ceids::kNumClasses; ++i) scores[i] = p.scores[i];
    }
  });
}

ceids_status ceids_predict_file(const ceids_model* model, const char* in_path,
                                const char* out_path) {
  if (!model || !in_path || !out_path) {
    return invalid_argument("model, in_path and out_path must be non-NULL");
  }
  return guarded([&] {
    const auto records = ceids::load_records(in_path);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) ceids::fail(ceids::ErrorKind::Io, std::string("cannot open for writing: ") + out_path);
    out << "index,predicted_class,score_normal,score_dos,score_probe,score_r2l,score_u2r\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto p = ceids::predict(model->model, records[i]);
      out << i << ',' << ceids::class_name(p.label);
      char buf[32];
      for (double s : p.scores) {
        std::snprintf(buf, sizeof(buf), "%.9g", s);
        out << ',' << buf;
      }
      out << '\n';
    }
    if (!out) ceids::fail(ceids::ErrorKind::Io, std::string("write failed: ") + out_path);
  });
}

ceids_status ceids_evaluate(const ceids_model* model, const ceids_dataset* ds, char** out) {
  if (!model || !ds || !out) return invalid_argument("model, dataset and out must be non-NULL");
  return guarded([&] {
    const auto& records = ds->records;
    if (records.empty()) ceids::fail(ceids::ErrorKind::EmptyInput, "dataset is empty");

    std::vector<ceids::ClassLabel> preds(records.size(), ceids::ClassLabel::Normal);
    std::vector<ceids::ClassLabel> truths(records.size(), ceids::ClassLabel::Normal);
    ceids::parallel_for(records.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        preds[i] = ceids::predict(model->model, records[i].record).label;
        truths[i] = records[i].label;
      }
    });

    const auto cm = ceids::confusion(preds, truths);
    json matrix = json::array();
    for (std::size_t t = 0; t < ceids::kNumClasses; ++t) {
      json row = json::array();
      for (std::size_t p = 0; p < ceids::kNumClasses; ++p) row.push_back(cm.counts[t][p]);
      matrix.push_back(row);
    }

    json per_class;
    for (std::size_t c = 0; c < ceids::kNumClasses; ++c) {
      const auto b = cm.one_vs_rest(c);
      per_class[ceids::class_name(static_cast<ceids::ClassLabel>(c))] =
          json{{"tp", b.tp}, {"tn", b.tn}, {"fp", b.fp}, {"fn", b.fn}};
    }

    const json report{
        {"records", records.size()},
        {"clusters", model->model.cluster_count()},
        {"confusion", matrix},
        {"per_class_counts", per_class},
        {"weighted", metrics_json(ceids::compute_metrics(cm, ceids::Averaging::WeightedPerClass))},
        {"binary_attack",
         metrics_json(ceids::compute_metrics(cm, ceids::Averaging::BinaryAttack))}};
    *out = dup_string(report.dump());
  });
}

ceids_status ceids_preprocess_file(const char* in_path, const char* matrix_path,
                                   const char* scaler_path) {
  if (!in_path || !matrix_path || !scaler_path) {
    return invalid_argument("in_path, matrix_path and scaler_path must be non-NULL");
  }
  return guarded([&] {
    const auto data = ceids::load_dataset(in_path);
    if (data.empty()) ceids::fail(ceids::ErrorKind::EmptyDataset, "no records to preprocess");

    const auto encoder = ceids::fit_nominal_encoder(data);
    ceids::Matrix features(data.size(), ceids::kNumFeatures);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto v = ceids::encode(data[i].record, encoder);
      std::copy(v.begin(), v.end(), features.row(i).begin());
    }
    const auto scaler = ceids::fit_minmax(features);
    ceids::apply_minmax_rows(features, scaler);

    std::ofstream out(matrix_path, std::ios::trunc);
    if (!out) {
      ceids::fail(ceids::ErrorKind::Io, std::string("cannot open for writing: ") + matrix_path);
    }
    char buf[32];
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = features.row(i);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c != 0) out << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", row[c]);
        out << buf;
      }
      out << ',' << ceids::class_name(data[i].label) << '\n';
    }
    if (!out) ceids::fail(ceids::ErrorKind::Io, std::string("write failed: ") + matrix_path);

    ceids::save_preprocess_bundle(scaler_path, encoder, scaler);
  });
}

}  // extern "C"

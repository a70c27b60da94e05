// Command-line front end for the CEIDS library. Talks to the core strictly
// through the C API in ceids.h.
//
// Exit codes: 0 success, 2 usage, 3 data/model errors, 4 config errors.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ceids.h"

using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConfig = 4;

int exit_code_for(ceids_status status) {
  switch (status) {
    case CEIDS_OK: return 0;
    case CEIDS_ERROR_CONFIG: return kExitConfig;
    case CEIDS_ERROR_INVALID_ARGUMENT: return kExitUsage;
    case CEIDS_ERROR_IO:
    case CEIDS_ERROR_PARSE:
    case CEIDS_ERROR_DATA:
    case CEIDS_ERROR_FORMAT: return kExitData;
    default: return 1;
  }
}

// Fails the whole command on the first error; every message names the stage.
struct CommandError {
  int code;
  std::string message;
};

void check(ceids_status status, const std::string& stage) {
  if (status != CEIDS_OK) {
    throw CommandError{exit_code_for(status), stage + ": " + ceids_last_error()};
  }
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  ceids_string_free(s);
  return out;
}

struct DatasetHandle {
  ceids_dataset* ptr = nullptr;
  ~DatasetHandle() { ceids_dataset_free(ptr); }
};

struct ConfigHandle {
  ceids_config* ptr = nullptr;
  ~ConfigHandle() { ceids_config_free(ptr); }
};

struct ModelHandle {
  ceids_model* ptr = nullptr;
  ~ModelHandle() { ceids_model_free(ptr); }
};

void print_class_counts(const std::string& title, const json& summary) {
  std::printf("%s: %llu records\n", title.c_str(),
              static_cast<unsigned long long>(summary.at("records").get<std::uint64_t>()));
  const auto& classes = summary.at("classes");
  for (const char* name : {"Normal", "DoS", "Probe", "R2L", "U2R"}) {
    std::printf("  %-7s %10llu\n", name,
                static_cast<unsigned long long>(classes.at(name).get<std::uint64_t>()));
  }
}

ConfigHandle build_config(const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
  ConfigHandle cfg;
  if (config_path.empty()) {
    check(ceids_config_create(&cfg.ptr), "config");
  } else {
    check(ceids_config_load(config_path.c_str(), &cfg.ptr), "config");
  }
  for (const auto& [key, value] : overrides) {
    check(ceids_config_set(cfg.ptr, key.c_str(), value.c_str()), "config");
  }
  return cfg;
}

std::string metrics_table(const json& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %10s %10s %10s %10s %10s %10s\n", "averaging",
                "accuracy", "precision", "recall", "f_score", "tpr", "fpr");
  out += line;
  for (const char* mode : {"weighted", "binary_attack"}) {
    const auto& m = report.at(mode);
    std::snprintf(line, sizeof(line), "%-16s %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f\n", mode,
                  m.at("accuracy").get<double>(), m.at("precision").get<double>(),
                  m.at("recall").get<double>(), m.at("f_score").get<double>(),
                  m.at("tpr").get<double>(), m.at("fpr").get<double>());
    out += line;
  }
  return out;
}

// Stable machine-readable keys, one per line.
std::string metrics_kv(const json& report, const json& model_info) {
  std::string out;
  char line[160];
  out += "K=" + std::to_string(report.at("clusters").get<std::size_t>()) + "\n";
  out += "records=" + std::to_string(report.at("records").get<std::size_t>()) + "\n";
  for (const auto& [mode, prefix] :
       std::vector<std::pair<std::string, std::string>>{{"weighted", ""},
                                                        {"binary_attack", "binary_"}}) {
    const auto& m = report.at(mode);
    for (const char* key : {"accuracy", "precision", "recall", "f_score", "tpr", "fpr"}) {
      std::snprintf(line, sizeof(line), "%s%s=%.9f\n", prefix.c_str(), key,
                    m.at(key).get<double>());
      out += line;
    }
  }
  std::string selection;
  std::size_t index = 0;
  for (const auto& cluster : model_info.at("selection")) {
    std::snprintf(line, sizeof(line), "%s%zu:%s:%.6f:%.6f:%s", index == 0 ? "" : ";", index,
                  cluster.at("kind").get<std::string>().c_str(),
                  cluster.at("dnn_accuracy").get<double>(),
                  cluster.at("svm_accuracy").get<double>(),
                  cluster.at("used_cv").get<bool>() ? "cv" : "fallback");
    selection += line;
    ++index;
  }
  out += "per_cluster_selection=" + selection + "\n";
  return out;
}

void write_file(const std::string& path, const std::string& content, const std::string& stage) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CommandError{kExitData, stage + ": cannot write " + path};
  out << content;
}

std::string read_file(const std::string& path, const std::string& stage) {
  std::ifstream in(path);
  if (!in) throw CommandError{kExitData, stage + ": cannot read " + path};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int run_ingest(const std::string& train_path, const std::string& test_path, bool summary) {
  (void)summary;  // the summary table is the command's whole output
  for (const auto& [title, path] :
       std::vector<std::pair<std::string, std::string>>{{"train", train_path}, {"test", test_path}}) {
    if (path.empty()) continue;
    DatasetHandle ds;
    check(ceids_dataset_load(path.c_str(), &ds.ptr), "ingest " + path);
    char* out = nullptr;
    check(ceids_dataset_summary_json(ds.ptr, &out), "ingest " + path);
    print_class_counts(title + " (" + path + ")", json::parse(take_string(out)));
  }
  return 0;
}

// The config file's `seed` key applies unless --seed was given explicitly.
std::uint64_t config_seed(const ceids_config* cfg) {
  char* dump = nullptr;
  check(ceids_config_dump(cfg, &dump), "config");
  const std::string text = take_string(dump);
  const std::string key = "seed = ";
  const std::size_t at = text.rfind(key);
  return at == std::string::npos ? 0 : std::strtoull(text.c_str() + at + key.size(), nullptr, 10);
}

int run_train(const std::string& train_path, const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>& overrides,
              std::uint64_t cli_seed, bool seed_given, const std::string& out_path) {
  DatasetHandle ds;
  check(ceids_dataset_load(train_path.c_str(), &ds.ptr), "load training data");

  ConfigHandle cfg = build_config(config_path, overrides);
  const std::uint64_t seed = seed_given ? cli_seed : config_seed(cfg.ptr);

  ModelHandle model;
  char* log_json = nullptr;
  check(ceids_train(ds.ptr, cfg.ptr, seed, &model.ptr, &log_json), "train");
  const json log_lines = json::parse(take_string(log_json));

  check(ceids_model_save(model.ptr, out_path.c_str()), "save model");

  char* info_json = nullptr;
  check(ceids_model_info_json(model.ptr, &info_json), "model info");
  const json info = json::parse(take_string(info_json));

  // Run log: everything needed to reproduce the run.
  std::string log_text;
  log_text += "seed=" + std::to_string(seed) + "\n";
  log_text += "train=" + train_path + "\n";
  log_text += "model=" + out_path + "\n";
  log_text += "K=" + std::to_string(info.at("clusters").get<std::size_t>()) + "\n";
  std::size_t index = 0;
  for (const auto& cluster : info.at("selection")) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "cluster%zu=%s dnn_accuracy=%.6f svm_accuracy=%.6f used_cv=%d\n", index,
                  cluster.at("kind").get<std::string>().c_str(),
                  cluster.at("dnn_accuracy").get<double>(),
                  cluster.at("svm_accuracy").get<double>(),
                  cluster.at("used_cv").get<bool>() ? 1 : 0);
    log_text += line;
    ++index;
  }
  for (const auto& line : log_lines) {
    log_text += "note=" + line.get<std::string>() + "\n";
  }
  log_text += "config:\n" + info.at("config").get<std::string>();
  write_file(out_path + ".log", log_text, "write run log");

  std::printf("trained model with %zu clusters -> %s\n",
              ceids_model_cluster_count(model.ptr), out_path.c_str());
  for (const auto& line : log_lines) {
    std::printf("  %s\n", line.get<std::string>().c_str());
  }
  std::printf("run log -> %s.log\n", out_path.c_str());
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& test_path,
                 const std::string& report_prefix) {
  ModelHandle model;
  check(ceids_model_load(model_path.c_str(), &model.ptr), "load model");
  DatasetHandle ds;
  check(ceids_dataset_load(test_path.c_str(), &ds.ptr), "load test data");

  char* report_json = nullptr;
  check(ceids_evaluate(model.ptr, ds.ptr, &report_json), "evaluate");
  const json report = json::parse(take_string(report_json));

  char* info_json = nullptr;
  check(ceids_model_info_json(model.ptr, &info_json), "model info");
  const json info = json::parse(take_string(info_json));

  const std::string table = metrics_table(report);
  std::printf("evaluated %zu records against %zu clusters\n",
              report.at("records").get<std::size_t>(), report.at("clusters").get<std::size_t>());
  std::fputs(table.c_str(), stdout);

  const std::string prefix = report_prefix.empty() ? model_path + ".eval" : report_prefix;
  write_file(prefix + ".txt", table, "write report");
  write_file(prefix + ".kv", metrics_kv(report, info), "write report");
  write_file(prefix + ".json", report.dump(2) + "\n", "write report");
  std::printf("reports -> %s.txt %s.kv %s.json\n", prefix.c_str(), prefix.c_str(), prefix.c_str());
  return 0;
}

int run_predict(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
  ModelHandle model;
  check(ceids_model_load(model_path.c_str(), &model.ptr), "load model");
  check(ceids_predict_file(model.ptr, in_path.c_str(), out_path.c_str()), "predict");
  std::printf("predictions -> %s\n", out_path.c_str());
  return 0;
}

int run_preprocess(const std::string& in_path, const std::string& out_path,
                   const std::string& scaler_path) {
  check(ceids_preprocess_file(in_path.c_str(), out_path.c_str(), scaler_path.c_str()),
        "preprocess");
  std::printf("matrix -> %s, scaler -> %s\n", out_path.c_str(), scaler_path.c_str());
  return 0;
}

int run_report(const std::string& kv_path, const std::string& model_path) {
  if (!model_path.empty()) {
    ModelHandle model;
    check(ceids_model_load(model_path.c_str(), &model.ptr), "load model");
    char* info_json = nullptr;
    check(ceids_model_info_json(model.ptr, &info_json), "model info");
    const json info = json::parse(take_string(info_json));
    std::printf("model %s\n", model_path.c_str());
    std::printf("  clusters (K): %zu\n", info.at("clusters").get<std::size_t>());
    std::printf("  seed: %llu\n",
                static_cast<unsigned long long>(info.at("seed").get<std::uint64_t>()));
    std::size_t index = 0;
    for (const auto& cluster : info.at("selection")) {
      std::printf("  cluster %zu: %s (dnn %.4f, svm %.4f, %s)\n", index,
                  cluster.at("kind").get<std::string>().c_str(),
                  cluster.at("dnn_accuracy").get<double>(),
                  cluster.at("svm_accuracy").get<double>(),
                  cluster.at("used_cv").get<bool>() ? "cv" : "fallback");
      ++index;
    }
  }
  if (!kv_path.empty()) {
    std::printf("%s", read_file(kv_path, "report").c_str());
  }
  return 0;
}

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw CommandError{kExitUsage, "--set expects key=value, got '" + item + "'"};
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CEIDS: clustered-ensemble intrusion detection over NSL-KDD records"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_train, ingest_test;
  bool ingest_summary = false;
  auto* ingest = app.add_subcommand("ingest", "parse datasets and print class counts");
  ingest->add_option("--train", ingest_train, "training set path");
  ingest->add_option("--test", ingest_test, "test set path");
  ingest->add_flag("--summary", ingest_summary, "print per-class summary (default behavior)");

  // preprocess
  std::string pre_in, pre_out, pre_scaler;
  auto* preprocess = app.add_subcommand("preprocess", "encode + scale a raw dataset");
  preprocess->add_option("--in", pre_in, "raw NSL-KDD file")->required();
  preprocess->add_option("--out", pre_out, "output CSV matrix")->required();
  preprocess->add_option("--scaler", pre_scaler, "encoder+scaler bundle output")->required();

  // train
  std::string train_path, train_config, train_out = "model.ceids";
  std::string train_bandwidth;
  std::uint64_t train_seed = 0;
  std::uint64_t ms_subsample = 0;
  std::string ms_tol, ms_max_iter;
  std::vector<std::string> train_sets;
  auto* train = app.add_subcommand("train", "train the full pipeline");
  train->add_option("--train", train_path, "training set path")->required();
  train->add_option("--config", train_config, "config file (flat key = value)");
  auto* seed_option =
      train->add_option("--seed", train_seed, "master seed (overrides the config's seed key)");
  train->add_option("--out", train_out, "model output path");
  train->add_option("--bandwidth", train_bandwidth, "mean-shift bandwidth: auto or a value");
  train->add_option("--ms-subsample", ms_subsample, "mean-shift fit subsample size");
  train->add_option("--ms-tol", ms_tol, "mean-shift convergence tolerance");
  train->add_option("--ms-max-iter", ms_max_iter, "mean-shift iteration cap");
  train->add_option("--set", train_sets, "config override key=value (repeatable)");

  // evaluate
  std::string eval_model, eval_test, eval_report;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a model on a labeled dataset");
  evaluate->add_option("--model", eval_model, "model path")->required();
  evaluate->add_option("--test", eval_test, "test set path")->required();
  evaluate->add_option("--report", eval_report, "report file prefix (default <model>.eval)");

  // predict
  std::string pred_model, pred_in, pred_out;
  auto* predict = app.add_subcommand("predict", "predict classes for a dataset");
  predict->add_option("--model", pred_model, "model path")->required();
  predict->add_option("--in", pred_in, "input NSL-KDD file")->required();
  predict->add_option("--out", pred_out, "output CSV path")->required();

  // report
  std::string report_in, report_model;
  auto* report = app.add_subcommand("report", "render a saved report or model info");
  report->add_option("--in", report_in, "metrics .kv file");
  report->add_option("--model", report_model, "model path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      if (ingest_train.empty() && ingest_test.empty()) {
        throw CommandError{kExitUsage, "ingest: need --train and/or --test"};
      }
      return run_ingest(ingest_train, ingest_test, ingest_summary);
    }
    if (*preprocess) return run_preprocess(pre_in, pre_out, pre_scaler);
    if (*train) {
      auto overrides = parse_overrides(train_sets);
      if (!train_bandwidth.empty()) overrides.emplace_back("meanshift.bandwidth", train_bandwidth);
      if (ms_subsample > 0) {
        overrides.emplace_back("meanshift.subsample", std::to_string(ms_subsample));
      }
      if (!ms_tol.empty()) overrides.emplace_back("meanshift.tol", ms_tol);
      if (!ms_max_iter.empty()) overrides.emplace_back("meanshift.max_iter", ms_max_iter);
      return run_train(train_path, train_config, overrides, train_seed, seed_option->count() > 0,
                       train_out);
    }
    if (*evaluate) return run_evaluate(eval_model, eval_test, eval_report);
    if (*predict) return run_predict(pred_model, pred_in, pred_out);
    if (*report) {
      if (report_in.empty() && report_model.empty()) {
        throw CommandError{kExitUsage, "report: need --in and/or --model"};
      }
      return run_report(report_in, report_model);
    }
  } catch (const CommandError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return kExitUsage;
}

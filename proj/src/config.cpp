#include "ceids/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ceids/autoencoder.hpp"
#include "ceids/errors.hpp"

namespace ceids {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void range_error(const std::string& key, const std::string& why) {
  fail(ErrorKind::Range, "config key '" + key + "': " + why);
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    fail(ErrorKind::ConfigParse, "config key '" + key + "': not a number: '" + value + "'");
  }
  return v;
}

double parse_positive_real(const std::string& key, const std::string& value) {
  const double v = parse_real(key, value);
  if (v <= 0.0) range_error(key, "must be positive");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorKind::ConfigParse, "config key '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& value, long long min_value) {
  const long long v = parse_integer(key, value);
  if (v < min_value) range_error(key, "must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  fail(ErrorKind::ConfigParse, "config key '" + key + "': expected a boolean, got '" + value + "'");
}

DnnProfileKind parse_profile(const std::string& key, const std::string& value) {
  if (value == "deep_sigmoid_mse") return DnnProfileKind::DeepSigmoidMse;
  if (value == "relu_crossentropy") return DnnProfileKind::ReluCrossentropy;
  fail(ErrorKind::Range, "config key '" + key + "': unknown profile '" + value + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// cluster<N>.dnn.profile
bool parse_cluster_key(const std::string& key, std::size_t& index) {
  constexpr std::string_view prefix = "cluster";
  constexpr std::string_view suffix = ".dnn.profile";
  if (key.size() <= prefix.size() + suffix.size()) return false;
  if (key.compare(0, prefix.size(), prefix) != 0) return false;
  if (key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
  const std::string digits = key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
  if (digits.empty() || digits.size() > 6 ||
      !std::all_of(digits.begin(), digits.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    return false;
  }
  index = static_cast<std::size_t>(std::stoull(digits));
  return true;
}

}  // namespace

const char* dnn_profile_name(DnnProfileKind kind) {
  switch (kind) {
    case DnnProfileKind::DeepSigmoidMse: return "deep_sigmoid_mse";
    case DnnProfileKind::ReluCrossentropy: return "relu_crossentropy";
  }
  return "?";
}

PipelineConfig default_config() { return PipelineConfig{}; }

void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "oversample") {
    cfg.oversample = parse_bool(key, value);
  } else if (key == "train.subsample") {
    cfg.train_subsample = parse_count(key, value, 0);
  } else if (key == "autoencoder.learning_rate") {
    cfg.ae_learning_rate = parse_positive_real(key, value);
  } else if (key == "autoencoder.epochs") {
    cfg.ae_epochs = parse_count(key, value, 0);
  } else if (key == "autoencoder.batch_size") {
    cfg.ae_batch_size = parse_count(key, value, 1);
  } else if (key == "meanshift.bandwidth") {
    cfg.ms_bandwidth = value == "auto" ? 0.0 : parse_positive_real(key, value);
  } else if (key == "meanshift.subsample") {
    cfg.ms_subsample = parse_count(key, value, 2);
  } else if (key == "meanshift.tol") {
    cfg.ms_tol = parse_positive_real(key, value);
  } else if (key == "meanshift.max_iter") {
    cfg.ms_max_iter = static_cast<int>(parse_count(key, value, 1));
  } else if (key == "dnn.profile") {
    cfg.dnn_profile = parse_profile(key, value);
  } else if (key == "dnn.learning_rate") {
    cfg.dnn_learning_rate = parse_positive_real(key, value);
  } else if (key == "dnn.epochs") {
    cfg.dnn_epochs = parse_count(key, value, 0);
  } else if (key == "dnn.batch_size") {
    cfg.dnn_batch_size = parse_count(key, value, 0);
  } else if (key == "svm.c") {
    cfg.svm_cost = parse_positive_real(key, value);
  } else if (key == "svm.epochs") {
    cfg.svm_epochs = parse_count(key, value, 0);
  } else if (key == "svm.learning_rate") {
    cfg.svm_learning_rate = parse_positive_real(key, value);
  } else if (key == "final.learning_rate") {
    cfg.final_learning_rate = parse_positive_real(key, value);
  } else if (key == "final.epochs") {
    cfg.final_epochs = parse_count(key, value, 0);
  } else if (key == "final.batch_size") {
    cfg.final_batch_size = parse_count(key, value, 1);
  } else if (key == "cv.folds") {
    cfg.cv_folds = parse_count(key, value, 2);
  } else if (key == "tiny_cluster_min") {
    cfg.tiny_cluster_min = parse_count(key, value, 2);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_count(key, value, 0));
  } else {
    std::size_t cluster_index = 0;
    if (parse_cluster_key(key, cluster_index)) {
      cfg.cluster_dnn_profile[cluster_index] = parse_profile(key, value);
    } else {
      fail(ErrorKind::UnknownKey, "unknown config key '" + key + "'");
    }
  }
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg = default_config();
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::ConfigParse,
           "config line " + std::to_string(line_number) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail(ErrorKind::ConfigParse,
           "config line " + std::to_string(line_number) + ": empty key or value");
    }
    set_config_key(cfg, key, value);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string resolved_text(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "oversample = " << (cfg.oversample ? "true" : "false") << "\n";
  out << "train.subsample = " << cfg.train_subsample << "\n";
  out << "autoencoder.learning_rate = " << format_real(cfg.ae_learning_rate) << "\n";
  out << "autoencoder.epochs = " << cfg.ae_epochs << "\n";
  out << "autoencoder.batch_size = " << cfg.ae_batch_size << "\n";
  if (cfg.ms_bandwidth > 0.0) {
    out << "meanshift.bandwidth = " << format_real(cfg.ms_bandwidth) << "\n";
  } else {
    out << "meanshift.bandwidth = auto\n";
  }
  out << "meanshift.subsample = " << cfg.ms_subsample << "\n";
  out << "meanshift.tol = " << format_real(cfg.ms_tol) << "\n";
  out << "meanshift.max_iter = " << cfg.ms_max_iter << "\n";
  out << "dnn.profile = " << dnn_profile_name(cfg.dnn_profile) << "\n";
  for (const auto& [index, profile] : cfg.cluster_dnn_profile) {
    out << "cluster" << index << ".dnn.profile = " << dnn_profile_name(profile) << "\n";
  }
  out << "dnn.learning_rate = " << format_real(cfg.dnn_learning_rate) << "\n";
  out << "dnn.epochs = " << cfg.dnn_epochs << "\n";
  out << "dnn.batch_size = " << cfg.dnn_batch_size << "\n";
  out << "svm.c = " << format_real(cfg.svm_cost) << "\n";
  out << "svm.epochs = " << cfg.svm_epochs << "\n";
  out << "svm.learning_rate = " << format_real(cfg.svm_learning_rate) << "\n";
  out << "final.learning_rate = " << format_real(cfg.final_learning_rate) << "\n";
  out << "final.epochs = " << cfg.final_epochs << "\n";
  out << "final.batch_size = " << cfg.final_batch_size << "\n";
  out << "cv.folds = " << cfg.cv_folds << "\n";
  out << "tiny_cluster_min = " << cfg.tiny_cluster_min << "\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

DnnSpec dnn_spec_for(DnnProfileKind kind, std::size_t input_dim, const PipelineConfig& cfg) {
  DnnSpec spec;
  switch (kind) {
    case DnnProfileKind::DeepSigmoidMse:
      // Six hidden layers of 25, 15, 15, 25, 15, 10 neurons, sigmoid
      // everywhere, summed squared error.
      spec.layer_sizes = {input_dim, 25, 15, 15, 25, 15, 10, kNumClasses};
      spec.activations.assign(spec.layer_sizes.size() - 1, Activation::Sigmoid);
      spec.loss = LossKind::MeanSquareError;
      spec.epochs = 30;
      spec.batch_size = 64;
      break;
    case DnnProfileKind::ReluCrossentropy:
      // Two hidden layers of 25 and 15 neurons, relu hidden, sigmoid output,
      // categorical cross-entropy.
      spec.layer_sizes = {input_dim, 25, 15, kNumClasses};
      spec.activations = {Activation::Relu, Activation::Relu, Activation::Sigmoid};
      spec.loss = LossKind::CategoricalCrossEntropy;
      spec.epochs = 40;
      spec.batch_size = 128;
      break;
  }
  if (cfg.dnn_epochs > 0) spec.epochs = cfg.dnn_epochs;
  if (cfg.dnn_batch_size > 0) spec.batch_size = cfg.dnn_batch_size;
  return spec;
}

DnnProfileKind profile_for_cluster(const PipelineConfig& cfg, std::size_t cluster_index) {
  const auto it = cfg.cluster_dnn_profile.find(cluster_index);
  return it == cfg.cluster_dnn_profile.end() ? cfg.dnn_profile : it->second;
}

SvmTrainConfig svm_config(const PipelineConfig& cfg, std::uint64_t seed) {
  SvmTrainConfig out;
  out.cost = cfg.svm_cost;
  out.epochs = cfg.svm_epochs;
  out.learning_rate = cfg.svm_learning_rate;
  out.seed = seed;
  return out;
}

}  // namespace ceids

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ceids/core.hpp"
#include "ceids/dataset.hpp"

namespace ceids {

// Integer codes per nominal feature, in first-appearance order over the
// training set. Frozen after fitting. Categories never seen in training get
// the reserved code == category count (NSL-KDD test sets contain services
// absent from the training set).
struct NominalEncoder {
  std::array<std::vector<std::string>, kNumNominalFeatures> categories;

  // Returns the reserved code categories[feature].size() when absent.
  std::size_t code_of(std::size_t feature, const std::string& value) const;

  bool operator==(const NominalEncoder&) const = default;
};

NominalEncoder fit_nominal_encoder(const std::vector<RawRecord>& train);
NominalEncoder fit_nominal_encoder(const std::vector<LabeledRecord>& train);

// 41-dim vector: numeric values in their original file positions, nominal
// slots (1, 2, 3) replaced by integer codes.
std::vector<double> encode(const RawRecord& record, const NominalEncoder& enc);

struct MinMaxScaler {
  std::vector<double> mins;
  std::vector<double> maxs;

  bool operator==(const MinMaxScaler&) const = default;
};

MinMaxScaler fit_minmax(const Matrix& train);

// (x - Min) / (Max - Min) per feature, clamped to [0, 1]; constant features
// map to 0.
void apply_minmax_inplace(std::span<double> v, const MinMaxScaler& scaler);
std::vector<double> apply_minmax(std::span<const double> v, const MinMaxScaler& scaler);
void apply_minmax_rows(Matrix& rows, const MinMaxScaler& scaler);

// Row indices for a balanced dataset: every original row exactly once (in
// order), followed by seeded uniform-with-replacement copies that bring each
// class up to the majority count.
std::vector<std::size_t> oversample_plan(std::span<const ClassLabel> labels, std::uint64_t seed);

void oversample(Matrix& features, std::vector<ClassLabel>& labels, std::uint64_t seed);

// Persists encoder + scaler in the model container format.
void save_preprocess_bundle(const std::string& path, const NominalEncoder& enc,
                            const MinMaxScaler& scaler);
void load_preprocess_bundle(const std::string& path, NominalEncoder& enc, MinMaxScaler& scaler);

class BinaryWriter;
class BinaryReader;
void serialize_encoder(BinaryWriter& w, const NominalEncoder& enc);
NominalEncoder deserialize_encoder(BinaryReader& r);
void serialize_scaler(BinaryWriter& w, const MinMaxScaler& s);
MinMaxScaler deserialize_scaler(BinaryReader& r);

}  // namespace ceids

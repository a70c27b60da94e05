#include "ceids/preprocess.hpp"

#include <algorithm>
#include <random>

#include "ceids/errors.hpp"
#include "ceids/serialize.hpp"

namespace ceids {

namespace {

void note_categories(NominalEncoder& enc, const RawRecord& rec) {
  for (std::size_t f = 0; f < kNumNominalFeatures; ++f) {
    auto& cats = enc.categories[f];
    if (std::find(cats.begin(), cats.end(), rec.nominal[f]) == cats.end()) {
      cats.push_back(rec.nominal[f]);
    }
  }
}

}  // namespace

std::size_t NominalEncoder::code_of(std::size_t feature, const std::string& value) const {
  const auto& cats = categories[feature];
  const auto it = std::find(cats.begin(), cats.end(), value);
  return it == cats.end() ? cats.size() : static_cast<std::size_t>(it - cats.begin());
}

NominalEncoder fit_nominal_encoder(const std::vector<RawRecord>& train) {
  if (train.empty()) fail(ErrorKind::EmptyDataset, "cannot fit nominal encoder on empty dataset");
  NominalEncoder enc;
  for (const auto& rec : train) note_categories(enc, rec);
  return enc;
}

NominalEncoder fit_nominal_encoder(const std::vector<LabeledRecord>& train) {
  if (train.empty()) fail(ErrorKind::EmptyDataset, "cannot fit nominal encoder on empty dataset");
  NominalEncoder enc;
  for (const auto& item : train) note_categories(enc, item.record);
  return enc;
}

std::vector<double> encode(const RawRecord& record, const NominalEncoder& enc) {
  std::vector<double> v(kNumFeatures);
  std::size_t numeric_slot = 0;
  std::size_t nominal_slot = 0;
  for (std::size_t pos = 0; pos < kNumFeatures; ++pos) {
    const bool nominal = std::find(kNominalPositions.begin(), kNominalPositions.end(), pos) !=
                         kNominalPositions.end();
    if (nominal) {
      v[pos] = static_cast<double>(enc.code_of(nominal_slot, record.nominal[nominal_slot]));
      ++nominal_slot;
    } else {
      v[pos] = record.numeric[numeric_slot++];
    }
  }
  return v;
}

MinMaxScaler fit_minmax(const Matrix& train) {
  if (train.rows() == 0) fail(ErrorKind::EmptyDataset, "cannot fit scaler on empty dataset");
  MinMaxScaler s;
  s.mins.assign(train.cols(), 0.0);
  s.maxs.assign(train.cols(), 0.0);
  for (std::size_t c = 0; c < train.cols(); ++c) {
    s.mins[c] = s.maxs[c] = train(0, c);
  }
  for (std::size_t r = 1; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < train.cols(); ++c) {
      s.mins[c] = std::min(s.mins[c], train(r, c));
      s.maxs[c] = std::max(s.maxs[c], train(r, c));
    }
  }
  return s;
}

void apply_minmax_inplace(std::span<double> v, const MinMaxScaler& scaler) {
  if (v.size() != scaler.mins.size()) {
    fail(ErrorKind::ArityMismatch, "vector arity " + std::to_string(v.size()) +
                                       " != scaler arity " + std::to_string(scaler.mins.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double range = scaler.maxs[i] - scaler.mins[i];
    if (range <= 0.0) {
      v[i] = 0.0;
    } else {
      v[i] = std::clamp((v[i] - scaler.mins[i]) / range, 0.0, 1.0);
    }
  }
}

std::vector<double> apply_minmax(std::span<const double> v, const MinMaxScaler& scaler) {
  std::vector<double> out(v.begin(), v.end());
  apply_minmax_inplace(out, scaler);
  return out;
}

void apply_minmax_rows(Matrix& rows, const MinMaxScaler& scaler) {
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    apply_minmax_inplace(rows.row(r), scaler);
  }
}

std::vector<std::size_t> oversample_plan(std::span<const ClassLabel> labels, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::size_t majority = 0;
  for (const auto& rows : by_class) {
    if (rows.empty()) {
      fail(ErrorKind::MissingClass, "oversample requires at least one record per class");
    }
    majority = std::max(majority, rows.size());
  }

  std::vector<std::size_t> plan(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) plan[i] = i;

  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& rows = by_class[c];
    std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
    for (std::size_t n = rows.size(); n < majority; ++n) {
      plan.push_back(rows[pick(rng)]);
    }
  }
  return plan;
}

void oversample(Matrix& features, std::vector<ClassLabel>& labels, std::uint64_t seed) {
  const auto plan = oversample_plan(labels, seed);
  Matrix out(plan.size(), features.cols());
  std::vector<ClassLabel> out_labels(plan.size(), ClassLabel::Normal);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto src = features.row(plan[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
    out_labels[i] = labels[plan[i]];
  }
  features = std::move(out);
  labels = std::move(out_labels);
}

namespace {

void write_encoder(BinaryWriter& w, const NominalEncoder& enc) {
  for (const auto& cats : enc.categories) {
    w.write_u64(cats.size());
    for (const auto& cat : cats) w.write_string(cat);
  }
}

NominalEncoder read_encoder(BinaryReader& r) {
  NominalEncoder enc;
  for (auto& cats : enc.categories) {
    const std::uint64_t n = r.read_u64();
    cats.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) cats.push_back(r.read_string());
  }
  return enc;
}

void write_scaler(BinaryWriter& w, const MinMaxScaler& s) {
  w.write_f64_span(s.mins);
  w.write_f64_span(s.maxs);
}

MinMaxScaler read_scaler(BinaryReader& r) {
  MinMaxScaler s;
  s.mins = r.read_f64_vector();
  s.maxs = r.read_f64_vector();
  return s;
}

}  // namespace

void save_preprocess_bundle(const std::string& path, const NominalEncoder& enc,
                            const MinMaxScaler& scaler) {
  BinaryWriter w;
  w.write_u8(static_cast<std::uint8_t>(PayloadKind::PreprocessBundle));
  write_encoder(w, enc);
  write_scaler(w, scaler);
  write_container(path, w.bytes());
}

void load_preprocess_bundle(const std::string& path, NominalEncoder& enc, MinMaxScaler& scaler) {
  const auto payload = read_container(path);
  BinaryReader r(payload);
  if (r.read_u8() != static_cast<std::uint8_t>(PayloadKind::PreprocessBundle)) {
    fail(ErrorKind::FormatVersion, "container does not hold a preprocess bundle: " + path);
  }
  enc = read_encoder(r);
  scaler = read_scaler(r);
}

// Reused by the ensemble model serializer.
void serialize_encoder(BinaryWriter& w, const NominalEncoder& enc) { write_encoder(w, enc); }
NominalEncoder deserialize_encoder(BinaryReader& r) { return read_encoder(r); }
void serialize_scaler(BinaryWriter& w, const MinMaxScaler& s) { write_scaler(w, s); }
MinMaxScaler deserialize_scaler(BinaryReader& r) { return read_scaler(r); }

}  // namespace ceids

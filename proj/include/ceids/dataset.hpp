#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ceids {

// NSL-KDD record layout: 41 comma-separated features, then the attack name,
// then an optional difficulty score. Features at positions 1, 2 and 3
// (protocol_type, service, flag) are nominal; the other 38 are numeric.
inline constexpr std::size_t kNumFeatures = 41;
inline constexpr std::size_t kNumNumericFeatures = 38;
inline constexpr std::size_t kNumNominalFeatures = 3;
inline constexpr std::array<std::size_t, kNumNominalFeatures> kNominalPositions = {1, 2, 3};
inline constexpr std::size_t kNumClasses = 5;

enum class ClassLabel : std::uint8_t { Normal = 0, Dos = 1, Probe = 2, R2l = 3, U2r = 4 };

const char* class_name(ClassLabel label);
std::array<double, kNumClasses> one_hot(ClassLabel label);

struct RawRecord {
  // Numeric features in file order (positions 0, 4..40).
  std::array<double, kNumNumericFeatures> numeric{};
  // protocol_type, service, flag.
  std::array<std::string, kNumNominalFeatures> nominal;
  std::string attack_name;
  std::optional<int> difficulty;

  bool operator==(const RawRecord&) const = default;
};

struct LabeledRecord {
  RawRecord record;
  ClassLabel label;
};

// Parses one NSL-KDD line (42 or 43 fields). line_number is used only for
// error messages. Throws FieldCount / NumericParse errors.
RawRecord parse_line(std::string_view line, std::size_t line_number = 0);

// Canonical comma-separated form; parse_line(format_record(r)) == r.
std::string format_record(const RawRecord& record);

// Maps a lowercase-trimmed attack name onto the five classes. Unknown names
// are hard errors; silently dropping them would corrupt metric denominators.
ClassLabel map_attack_label(const std::string& attack_name);
bool is_known_attack(const std::string& attack_name);

std::vector<LabeledRecord> load_dataset(const std::string& path);

// Same file format, but attack names are kept verbatim and not mapped.
// Used by the predict path where labels may be absent or placeholders.
std::vector<RawRecord> load_records(const std::string& path);

std::array<std::uint64_t, kNumClasses> class_counts(const std::vector<LabeledRecord>& data);

}  // namespace ceids

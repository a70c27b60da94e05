#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ceids/core.hpp"

namespace ceids {

// Model container: magic "CEIDS", u32 format version, u64 payload size,
// u32 CRC of the payload, then the payload. All integers and doubles are
// little-endian; doubles are raw IEEE-754 bits, so round trips are bit-exact.

inline constexpr char kContainerMagic[5] = {'C', 'E', 'I', 'D', 'S'};
inline constexpr std::uint32_t kFormatVersion = 1;

// Payload discriminator, first byte of every payload.
enum class PayloadKind : std::uint8_t {
  EnsembleModel = 1,
  PreprocessBundle = 2,
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

class BinaryWriter {
 public:
  void write_u8(std::uint8_t v);
  void write_u32(std::uint32_t v);
  void write_u64(std::uint64_t v);
  void write_f64(double v);
  void write_string(std::string_view s);
  void write_f64_span(std::span<const double> v);
  void write_matrix(const Matrix& m);

  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t read_u8();
  std::uint32_t read_u32();
  std::uint64_t read_u64();
  double read_f64();
  std::string read_string();
  std::vector<double> read_f64_vector();
  Matrix read_matrix();

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_container(const std::string& path, std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> read_container(const std::string& path);

}  // namespace ceids

#include "ceids/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "ceids/errors.hpp"

namespace ceids {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xedb88320u ^ (c >> 1) : (c >> 1);
    }
    table[i] = c;
  }
  return table;
}

const std::array<std::uint32_t, 256> kCrcTable = make_crc_table();

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  std::uint32_t c = 0xffffffffu;
  for (std::uint8_t b : bytes) {
    c = kCrcTable[(c ^ b) & 0xffu] ^ (c >> 8);
  }
  return c ^ 0xffffffffu;
}

void BinaryWriter::write_u8(std::uint8_t v) { buf_.push_back(v); }

void BinaryWriter::write_u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::write_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::write_f64(double v) { write_u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::write_string(std::string_view s) {
  write_u64(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::write_f64_span(std::span<const double> v) {
  write_u64(v.size());
  for (double d : v) write_f64(d);
}

void BinaryWriter::write_matrix(const Matrix& m) {
  write_u64(m.rows());
  write_u64(m.cols());
  for (double d : m.data()) write_f64(d);
}

void BinaryReader::need(std::size_t n) const {
  // pos_ <= size always holds, so the subtraction cannot wrap even when a
  // corrupt length prefix makes n enormous.
  if (n > bytes_.size() - pos_) {
    fail(ErrorKind::Checksum, "container payload truncated");
  }
}

std::uint8_t BinaryReader::read_u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint32_t BinaryReader::read_u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::read_u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

double BinaryReader::read_f64() { return std::bit_cast<double>(read_u64()); }

std::string BinaryReader::read_string() {
  const std::uint64_t n = read_u64();
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<double> BinaryReader::read_f64_vector() {
  const std::uint64_t n = read_u64();
  if (n > (bytes_.size() - pos_) / 8) fail(ErrorKind::Checksum, "container payload truncated");
  std::vector<double> v(n);
  for (std::uint64_t i = 0; i < n; ++i) v[i] = read_f64();
  return v;
}

Matrix BinaryReader::read_matrix() {
  const std::uint64_t rows = read_u64();
  const std::uint64_t cols = read_u64();
  const std::uint64_t remaining = (bytes_.size() - pos_) / 8;
  if (rows != 0 && (cols > remaining / rows)) {
    fail(ErrorKind::Checksum, "container payload truncated");
  }
  Matrix m(rows, cols);
  for (double& d : m.data()) d = read_f64();
  return m;
}

void write_container(const std::string& path, std::span<const std::uint8_t> payload) {
  BinaryWriter header;
  for (char c : kContainerMagic) header.write_u8(static_cast<std::uint8_t>(c));
  header.write_u32(kFormatVersion);
  header.write_u64(payload.size());
  header.write_u32(crc32(payload));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(header.bytes().data()),
            static_cast<std::streamsize>(header.bytes().size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

std::vector<std::uint8_t> read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open: " + path);
  std::vector<std::uint8_t> all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t kHeaderSize = 5 + 4 + 8 + 4;
  if (all.size() < kHeaderSize) fail(ErrorKind::Checksum, "container truncated: " + path);
  if (std::memcmp(all.data(), kContainerMagic, 5) != 0) {
    fail(ErrorKind::FormatVersion, "not a model container: " + path);
  }
  BinaryReader header(std::span<const std::uint8_t>(all).subspan(5, kHeaderSize - 5));
  const std::uint32_t version = header.read_u32();
  if (version != kFormatVersion) {
    fail(ErrorKind::FormatVersion,
         "unsupported container version " + std::to_string(version) + ": " + path);
  }
  const std::uint64_t payload_size = header.read_u64();
  const std::uint32_t expected_crc = header.read_u32();
  if (all.size() - kHeaderSize != payload_size) {
    fail(ErrorKind::Checksum, "container truncated: " + path);
  }
  std::vector<std::uint8_t> payload(all.begin() + kHeaderSize, all.end());
  if (crc32(payload) != expected_crc) {
    fail(ErrorKind::Checksum, "container checksum mismatch: " + path);
  }
  return payload;
}

}  // namespace ceids

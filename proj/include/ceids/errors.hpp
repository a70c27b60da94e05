#pragma once

#include <stdexcept>
#include <string>

namespace ceids {

// One enumerator per failure family. The C API flattens these onto its
// coarser status codes; inside the C++ core they travel as exceptions.
enum class ErrorKind {
  Io,
  FieldCount,
  NumericParse,
  UnknownAttack,
  EmptyDataset,
  ArityMismatch,
  MissingClass,
  BadTopology,
  BadConfig,
  DegenerateData,
  EmptyNeighborhood,
  SingleClass,
  TinyCluster,
  LengthMismatch,
  EmptyInput,
  BadK,
  FormatVersion,
  Checksum,
  ConfigParse,
  UnknownKey,
  Range,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ceids

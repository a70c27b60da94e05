#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace ceids {

// Dense row-major matrix of doubles. Rows are samples almost everywhere in
// this codebase; the neural net also uses it for fan_out x fan_in weights.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double value) { data_.assign(data_.size(), value); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Stable seed derivation: the master seed fans out to per-stage streams so a
// stage can be replayed in isolation. Hashing is FNV-1a over the stage name,
// mixed with splitmix64 (never std::hash, which varies between builds).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index);

// Runs fn over [0, n) split into contiguous chunks, one chunk per worker.
// Callers must write disjoint outputs; results are then independent of
// scheduling. Worker count comes from the hardware, capped by the
// CEIDS_THREADS environment variable (1 forces serial execution).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

std::size_t argmax(std::span<const double> values);

}  // namespace ceids

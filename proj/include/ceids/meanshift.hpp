#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ceids/core.hpp"

namespace ceids {

// Hard mean-shift clustering: every seed point climbs to the kernel-weighted
// mean of its neighborhood until it stops moving; converged points closer
// than half the bandwidth collapse into one mode.
struct MeanShiftModel {
  double bandwidth = 0.0;
  // Modes in descending basin population (ties kept in formation order).
  std::vector<std::vector<double>> modes;
  std::size_t fit_subsample_size = 0;

  bool operator==(const MeanShiftModel&) const = default;
};

// Shuffles under seed, keeps ceil(n/3) points (capped at 2,000), histograms
// all pairwise distances into 50 bins over [0, max] and returns the midpoint
// of the most populated bin. Falls back to the smallest nonzero distance if
// that midpoint is zero.
double estimate_bandwidth(const Matrix& data, std::uint64_t seed);

// One mean-shift step: Gaussian-weighted mean of the points within radius h
// of x. Throws EmptyNeighborhood when no point is in range.
std::vector<double> shift(std::span<const double> x, const Matrix& data, double h);

MeanShiftModel fit(const Matrix& data, double h, double tol = 1e-4, int max_iter = 300);

// Fits on a seeded uniform subsample; full-dataset mean-shift is quadratic
// per iteration and intractable at NSL-KDD scale.
MeanShiftModel fit_subsampled(const Matrix& data, double h, double tol, int max_iter,
                              std::size_t subsample, std::uint64_t seed);

struct Assignment {
  std::size_t cluster = 0;
  std::vector<double> membership;  // one-hot over modes
};

// Nearest mode by Euclidean distance, ties to the lowest index.
Assignment assign(const MeanShiftModel& model, std::span<const double> x);
std::size_t nearest_mode(const MeanShiftModel& model, std::span<const double> x);

}  // namespace ceids

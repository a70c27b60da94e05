#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ceids/core.hpp"
#include "ceids/dataset.hpp"

namespace ceids {

// Linear soft-margin SVM trained in the primal: minimize
// 0.5*||theta||^2 + C * sum hinge, by seeded per-sample subgradient descent.
struct SvmBinary {
  std::vector<double> theta;
  double theta0 = 0.0;
  // A machine for a class with no training samples; its decision is pinned
  // to kDegenerateDecision so it never wins an argmax.
  bool degenerate = false;

  bool operator==(const SvmBinary&) const = default;
};

inline constexpr double kDegenerateDecision = -1e30;

struct SvmTrainConfig {
  double cost = 1.0;  // C
  std::size_t epochs = 20;
  double learning_rate = 0.1;  // decays as learning_rate / sqrt(epoch)
  std::uint64_t seed = 0;
};

// labels are +1 / -1; both must be present.
SvmBinary train_binary(const Matrix& points, std::span<const int> labels,
                       const SvmTrainConfig& cfg,
                       std::vector<double>* objective_history = nullptr);

double decision(const SvmBinary& m, std::span<const double> x);

double hinge_objective(const SvmBinary& m, const Matrix& points, std::span<const int> labels,
                       double cost);

// One binary machine per class, one-vs-rest.
struct SvmModel {
  std::array<SvmBinary, kNumClasses> machines;

  bool operator==(const SvmModel&) const = default;
};

SvmModel train_ovr(const Matrix& points, std::span<const ClassLabel> labels,
                   const SvmTrainConfig& cfg);
SvmModel train_ovr_indexed(const Matrix& points, std::span<const ClassLabel> labels,
                           std::span<const std::size_t> rows, const SvmTrainConfig& cfg);

// Softmax over the five decision values; argmax is preserved.
std::array<double, kNumClasses> predict_scores(const SvmModel& m, std::span<const double> x);

}  // namespace ceids

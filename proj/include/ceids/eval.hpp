#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ceids/dataset.hpp"

namespace ceids {

struct ConfusionMatrix {
  // counts[truth][prediction]
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;

  struct BinaryCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  };

  // One-vs-rest reduction for a single class.
  BinaryCounts one_vs_rest(std::size_t cls) const;
  // Collapse to {Normal, Attack}: any attack class counts as attack.
  BinaryCounts attack_vs_normal() const;
};

enum class Averaging : std::uint8_t {
  BinaryAttack = 0,      // attack/normal collapse
  WeightedPerClass = 1,  // per-class one-vs-rest, weighted by class support
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  // Set when any metric hit a zero denominator and was pinned to 0.
  bool degenerate = false;
};

ConfusionMatrix confusion(std::span<const ClassLabel> preds, std::span<const ClassLabel> truths);

// f-score defaults to 2PR/(P+R). literal_fscore switches to the factor-free
// PR/(P+R) variant, kept for fidelity audits only.
Metrics compute_metrics(const ConfusionMatrix& cm, Averaging averaging,
                        bool literal_fscore = false);

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;
};

// Seeded shuffle, then contiguous near-equal slices (the first n % k folds
// carry the extra element).
FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
};

// Trains from scratch per fold and scores on the held-out fold.
using FoldScorer = std::function<double(std::span<const std::size_t> train_rows,
                                        std::span<const std::size_t> validate_rows,
                                        std::uint64_t fold_seed)>;

CvResult cross_validate(std::size_t n, std::size_t k, std::uint64_t seed,
                        const FoldScorer& scorer);

}  // namespace ceids

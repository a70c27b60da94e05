#include "ceids/eval.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ceids/core.hpp"
#include "ceids/errors.hpp"

namespace ceids {

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

struct BinaryMetrics {
  double accuracy, precision, recall, fpr;
  bool degenerate;
};

BinaryMetrics from_counts(const ConfusionMatrix::BinaryCounts& c) {
  BinaryMetrics m{};
  m.degenerate = false;
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn, m.degenerate);
  m.precision = ratio(c.tp, c.tp + c.fp, m.degenerate);
  m.recall = ratio(c.tp, c.tp + c.fn, m.degenerate);
  m.fpr = ratio(c.fp, c.tn + c.fp, m.degenerate);
  return m;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) t += c;
  }
  return t;
}

ConfusionMatrix::BinaryCounts ConfusionMatrix::one_vs_rest(std::size_t cls) const {
  BinaryCounts b;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const std::uint64_t n = counts[t][p];
      if (t == cls && p == cls) {
        b.tp += n;
      } else if (t == cls) {
        b.fn += n;
      } else if (p == cls) {
        b.fp += n;
      } else {
        b.tn += n;
      }
    }
  }
  return b;
}

ConfusionMatrix::BinaryCounts ConfusionMatrix::attack_vs_normal() const {
  const auto normal = static_cast<std::size_t>(ClassLabel::Normal);
  BinaryCounts b;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      const std::uint64_t n = counts[t][p];
      const bool truth_attack = t != normal;
      const bool pred_attack = p != normal;
      if (truth_attack && pred_attack) {
        b.tp += n;
      } else if (!truth_attack && !pred_attack) {
        b.tn += n;
      } else if (!truth_attack && pred_attack) {
        b.fp += n;
      } else {
        b.fn += n;
      }
    }
  }
  return b;
}

ConfusionMatrix confusion(std::span<const ClassLabel> preds, std::span<const ClassLabel> truths) {
  if (preds.size() != truths.size()) {
    fail(ErrorKind::LengthMismatch, "prediction and truth lengths differ");
  }
  if (preds.empty()) fail(ErrorKind::EmptyInput, "confusion matrix needs at least one record");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    cm.counts[static_cast<std::size_t>(truths[i])][static_cast<std::size_t>(preds[i])]++;
  }
  return cm;
}

Metrics compute_metrics(const ConfusionMatrix& cm, Averaging averaging, bool literal_fscore) {
  const std::uint64_t total = cm.total();
  if (total == 0) fail(ErrorKind::EmptyInput, "metrics on empty confusion matrix");

  Metrics out;
  if (averaging == Averaging::BinaryAttack) {
    const BinaryMetrics m = from_counts(cm.attack_vs_normal());
    out.accuracy = m.accuracy;
    out.precision = m.precision;
    out.recall = m.recall;
    out.fpr = m.fpr;
    out.degenerate = m.degenerate;
  } else {
    // Multiclass accuracy is the diagonal fraction; the one-vs-rest metrics
    // are averaged with class-support weights.
    std::uint64_t diagonal = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) diagonal += cm.counts[c][c];
    out.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      std::uint64_t support = 0;
      for (std::size_t p = 0; p < kNumClasses; ++p) support += cm.counts[c][p];
      if (support == 0) continue;
      const double weight = static_cast<double>(support) / static_cast<double>(total);
      const BinaryMetrics m = from_counts(cm.one_vs_rest(c));
      out.precision += weight * m.precision;
      out.recall += weight * m.recall;
      out.fpr += weight * m.fpr;
      out.degenerate = out.degenerate || m.degenerate;
    }
  }

  const double pr_sum = out.precision + out.recall;
  if (pr_sum <= 0.0) {
    out.f_score = 0.0;
    out.degenerate = true;
  } else {
    const double factor = literal_fscore ? 1.0 : 2.0;
    out.f_score = factor * out.precision * out.recall / pr_sum;
  }
  out.tpr = out.recall;
  return out;
}

FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::BadK, "k must be at least 2");
  if (n < k) fail(ErrorKind::BadK, "need at least k records");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan;
  plan.folds.resize(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    plan.folds[f].assign(order.begin() + cursor, order.begin() + cursor + size);
    cursor += size;
  }
  return plan;
}

CvResult cross_validate(std::size_t n, std::size_t k, std::uint64_t seed,
                        const FoldScorer& scorer) {
  const FoldPlan plan = kfold_split(n, k, derive_seed(seed, "kfold"));

  CvResult result;
  result.fold_accuracies.assign(k, 0.0);
  std::vector<std::exception_ptr> fold_errors(k);
  parallel_for(k, [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      std::vector<std::size_t> train_rows;
      train_rows.reserve(n - plan.folds[f].size());
      for (std::size_t other = 0; other < k; ++other) {
        if (other == f) continue;
        train_rows.insert(train_rows.end(), plan.folds[other].begin(), plan.folds[other].end());
      }
      try {
        result.fold_accuracies[f] =
            scorer(train_rows, plan.folds[f], derive_seed(seed, "fold", f));
      } catch (...) {
        fold_errors[f] = std::current_exception();
      }
    }
  });
  for (std::size_t f = 0; f < k; ++f) {
    if (!fold_errors[f]) continue;
    try {
      std::rethrow_exception(fold_errors[f]);
    } catch (const Error& e) {
      fail(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
    } catch (const std::exception& e) {
      fail(ErrorKind::BadConfig, "fold " + std::to_string(f) + ": " + e.what());
    }
  }

  result.mean_accuracy =
      std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) /
      static_cast<double>(k);
  return result;
}

}  // namespace ceids

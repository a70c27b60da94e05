#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "ceids/errors.hpp"
#include "ceids/eval.hpp"

using namespace ceids;

namespace {

std::vector<ClassLabel> random_labels(std::size_t n, std::uint64_t seed) {
  std::vector<ClassLabel> labels(n, ClassLabel::Normal);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 4);
  for (auto& l : labels) l = static_cast<ClassLabel>(pick(rng));
  return labels;
}

}  // namespace

TEST_CASE("confusion: perfect predictions are diagonal") {
  const auto truths = random_labels(10, 1);
  const ConfusionMatrix cm = confusion(truths, truths);
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) trace += cm.counts[c][c];
  CHECK(trace == 10);
  CHECK(cm.total() == 10);
}

TEST_CASE("confusion: one wrong record lands off-diagonal") {
  const std::vector<ClassLabel> truths = {ClassLabel::Dos};
  const std::vector<ClassLabel> preds = {ClassLabel::Probe};
  const ConfusionMatrix cm = confusion(preds, truths);
  CHECK(cm.counts[1][2] == 1);
  CHECK(cm.total() == 1);
}

TEST_CASE("confusion matches brute-force tallying on random data") {
  const auto truths = random_labels(1000, 2);
  const auto preds = random_labels(1000, 3);
  const ConfusionMatrix cm = confusion(preds, truths);

  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      std::uint64_t expected = 0;
      for (std::size_t i = 0; i < truths.size(); ++i) {
        if (static_cast<std::size_t>(truths[i]) == t &&
            static_cast<std::size_t>(preds[i]) == p) {
          ++expected;
        }
      }
      CHECK(cm.counts[t][p] == expected);
    }
  }

  // per class, the one-vs-rest quadrants cover everything
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto b = cm.one_vs_rest(c);
    CHECK(b.tp + b.tn + b.fp + b.fn == cm.total());
  }
}

TEST_CASE("confusion input validation") {
  CHECK_THROWS_AS((void)confusion(random_labels(3, 1), random_labels(4, 1)), Error);
  CHECK_THROWS_AS((void)confusion({}, {}), Error);
}

TEST_CASE("metrics: perfect predictions") {
  const auto truths = random_labels(50, 4);
  const ConfusionMatrix cm = confusion(truths, truths);
  for (Averaging mode : {Averaging::BinaryAttack, Averaging::WeightedPerClass}) {
    const Metrics m = compute_metrics(cm, mode);
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK(m.fpr == doctest::Approx(0.0));
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.tpr == m.recall);
  }
}

TEST_CASE("f-score from the published precision/recall pair") {
  // P = 0.965, R = 0.954 must give ~0.9595 under the factor-2 form.
  ConfusionMatrix cm;
  // Build a binary-attack matrix with exactly those rates: 1000 attacks,
  // recall 0.954 -> 954 detected; precision 0.965 -> fp = 954/0.965 - 954.
  // Rational counts: use tp=9540, fp=346, fn=460 (tp/(tp+fp)=0.96499...).
  cm.counts[1][1] = 9540;                       // attack detected
  cm.counts[1][0] = 460;                        // missed attack
  cm.counts[0][1] = 346;                        // false alarm
  cm.counts[0][0] = 100000;                     // quiet normals
  const Metrics m = compute_metrics(cm, Averaging::BinaryAttack);
  CHECK(m.precision == doctest::Approx(0.965).epsilon(5e-4));
  CHECK(m.recall == doctest::Approx(0.954).epsilon(5e-4));
  CHECK(m.f_score == doctest::Approx(0.9595).epsilon(5e-4));

  const Metrics literal = compute_metrics(cm, Averaging::BinaryAttack, true);
  CHECK(literal.f_score == doctest::Approx(0.9595 / 2.0).epsilon(5e-4));
}

TEST_CASE("metrics: hand case tp=8 tn=5 fp=2 fn=1") {
  ConfusionMatrix cm;
  cm.counts[1][1] = 8;  // attacks detected
  cm.counts[0][0] = 5;  // normals passed
  cm.counts[0][1] = 2;  // false alarms
  cm.counts[1][0] = 1;  // missed attack
  const Metrics m = compute_metrics(cm, Averaging::BinaryAttack);
  CHECK(m.accuracy == doctest::Approx(13.0 / 16.0));
  CHECK(m.precision == doctest::Approx(0.8));
  CHECK(m.recall == doctest::Approx(8.0 / 9.0));
  CHECK(m.fpr == doctest::Approx(2.0 / 7.0));
  CHECK(m.tpr == m.recall);
}

TEST_CASE("zero denominators pin metrics to zero and set the flag") {
  ConfusionMatrix cm;
  cm.counts[0][0] = 10;  // only normals, nothing ever flagged as attack
  const Metrics m = compute_metrics(cm, Averaging::BinaryAttack);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.degenerate);
}

TEST_CASE("binary-attack accuracy equals a directly built 2x2 matrix") {
  const auto truths = random_labels(500, 6);
  const auto preds = random_labels(500, 7);
  const ConfusionMatrix cm = confusion(preds, truths);
  const Metrics m = compute_metrics(cm, Averaging::BinaryAttack);

  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool truth_attack = truths[i] != ClassLabel::Normal;
    const bool pred_attack = preds[i] != ClassLabel::Normal;
    if (truth_attack == pred_attack) ++agree;
  }
  CHECK(m.accuracy == doctest::Approx(static_cast<double>(agree) / 500.0));
}

TEST_CASE("weighted metrics stay within [0,1] and tpr == recall") {
  const auto truths = random_labels(300, 8);
  const auto preds = random_labels(300, 9);
  const Metrics m = compute_metrics(confusion(preds, truths), Averaging::WeightedPerClass);
  for (double v : {m.accuracy, m.precision, m.recall, m.f_score, m.tpr, m.fpr}) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(m.tpr == m.recall);
}

TEST_CASE("kfold: singleton folds when n == k") {
  const FoldPlan plan = kfold_split(10, 10, 5);
  REQUIRE(plan.folds.size() == 10);
  for (const auto& fold : plan.folds) CHECK(fold.size() == 1);
}

TEST_CASE("kfold: remainder spreads over the first folds") {
  const FoldPlan plan = kfold_split(103, 10, 5);
  REQUIRE(plan.folds.size() == 10);
  for (std::size_t f = 0; f < 3; ++f) CHECK(plan.folds[f].size() == 11);
  for (std::size_t f = 3; f < 10; ++f) CHECK(plan.folds[f].size() == 10);
}

TEST_CASE("kfold folds partition the index range") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const std::size_t n = k + rng() % 400;
    const FoldPlan plan = kfold_split(n, k, rng());

    std::set<std::size_t> seen;
    std::size_t total = 0;
    std::size_t smallest = n, largest = 0;
    for (const auto& fold : plan.folds) {
      total += fold.size();
      smallest = std::min(smallest, fold.size());
      largest = std::max(largest, fold.size());
      for (std::size_t idx : fold) {
        CHECK(idx < n);
        CHECK(seen.insert(idx).second);  // disjoint
      }
    }
    CHECK(total == n);
    CHECK(seen.size() == n);
    CHECK(largest - smallest <= 1);
  }
}

TEST_CASE("kfold determinism and validation") {
  const FoldPlan a = kfold_split(57, 10, 3);
  const FoldPlan b = kfold_split(57, 10, 3);
  CHECK(a.folds == b.folds);
  CHECK_THROWS_AS((void)kfold_split(10, 1, 0), Error);
  CHECK_THROWS_AS((void)kfold_split(5, 10, 0), Error);
}

TEST_CASE("cross_validate: constant predictor on single-class data scores 1") {
  const CvResult r = cross_validate(40, 10, 3,
                                    [](std::span<const std::size_t>, std::span<const std::size_t>,
                                       std::uint64_t) { return 1.0; });
  REQUIRE(r.fold_accuracies.size() == 10);
  CHECK(r.mean_accuracy == doctest::Approx(1.0));
}

TEST_CASE("cross_validate mean equals the arithmetic mean of fold scores") {
  std::size_t call = 0;
  const CvResult r = cross_validate(
      50, 10, 9,
      [&call](std::span<const std::size_t>, std::span<const std::size_t>, std::uint64_t) {
        return 0.1 * static_cast<double>(call++ % 7);
      });
  const double expected =
      std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / 10.0;
  CHECK(r.mean_accuracy == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cross_validate hands each fold the complement as training rows") {
  cross_validate(30, 5, 4,
                 [](std::span<const std::size_t> train_rows,
                    std::span<const std::size_t> validate_rows, std::uint64_t) {
                   CHECK(train_rows.size() + validate_rows.size() == 30);
                   std::set<std::size_t> all(train_rows.begin(), train_rows.end());
                   for (std::size_t v : validate_rows) CHECK(all.insert(v).second);
                   CHECK(all.size() == 30);
                   return 0.5;
                 });
}

TEST_CASE("cross_validate attributes trainer errors to a fold") {
  try {
    (void)cross_validate(20, 4, 1,
                         [](std::span<const std::size_t>, std::span<const std::size_t>,
                            std::uint64_t) -> double {
                           fail(ErrorKind::SingleClass, "boom");
                         });
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingleClass);
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}

#include "ceids/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ceids/errors.hpp"

namespace ceids {

double decision(const SvmBinary& m, std::span<const double> x) {
  if (m.degenerate) return kDegenerateDecision;
  if (x.size() != m.theta.size()) {
    fail(ErrorKind::ArityMismatch, "decision arity " + std::to_string(x.size()) + ", expected " +
                                       std::to_string(m.theta.size()));
  }
  double d = m.theta0;
  for (std::size_t i = 0; i < x.size(); ++i) d += m.theta[i] * x[i];
  return d;
}

double hinge_objective(const SvmBinary& m, const Matrix& points, std::span<const int> labels,
                       double cost) {
  double reg = 0.0;
  for (double t : m.theta) reg += t * t;
  double total = 0.5 * reg;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    const double margin = static_cast<double>(labels[r]) * decision(m, points.row(r));
    total += cost * std::max(0.0, 1.0 - margin);
  }
  return total;
}

SvmBinary train_binary(const Matrix& points, std::span<const int> labels,
                       const SvmTrainConfig& cfg, std::vector<double>* objective_history) {
  if (points.rows() == 0) fail(ErrorKind::EmptyDataset, "svm needs training data");
  if (labels.size() != points.rows()) {
    fail(ErrorKind::LengthMismatch, "label count does not match point count");
  }
  const bool has_pos = std::find(labels.begin(), labels.end(), +1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) {
    fail(ErrorKind::SingleClass, "svm training requires both labels");
  }

  SvmBinary m;
  m.theta.assign(points.cols(), 0.0);
  const double n = static_cast<double>(points.rows());

  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  if (objective_history) {
    objective_history->clear();
    objective_history->push_back(hinge_objective(m, points, labels, cfg.cost));
  }

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double step = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (std::size_t r : order) {
      const auto x = points.row(r);
      const double y = static_cast<double>(labels[r]);
      const double margin = y * decision(m, x);
      // Per-sample subgradient: the regularizer contributes theta/n so one
      // epoch sums to the full objective's gradient.
      const double hinge_active = margin < 1.0 ? 1.0 : 0.0;
      for (std::size_t i = 0; i < m.theta.size(); ++i) {
        m.theta[i] -= step * (m.theta[i] / n - hinge_active * cfg.cost * y * x[i]);
      }
      m.theta0 -= step * (-hinge_active * cfg.cost * y);
    }
    if (objective_history) {
      objective_history->push_back(hinge_objective(m, points, labels, cfg.cost));
    }
  }
  return m;
}

SvmModel train_ovr(const Matrix& points, std::span<const ClassLabel> labels,
                   const SvmTrainConfig& cfg) {
  std::vector<std::size_t> rows(points.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return train_ovr_indexed(points, labels, rows, cfg);
}

SvmModel train_ovr_indexed(const Matrix& points, std::span<const ClassLabel> labels,
                           std::span<const std::size_t> rows, const SvmTrainConfig& cfg) {
  if (rows.empty()) fail(ErrorKind::EmptyDataset, "svm needs training data");

  Matrix subset(rows.size(), points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = points.row(rows[i]);
    std::copy(src.begin(), src.end(), subset.row(i).begin());
  }

  SvmModel model;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::vector<int> binary(rows.size());
    bool any_positive = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const bool positive = static_cast<std::size_t>(labels[rows[i]]) == c;
      binary[i] = positive ? +1 : -1;
      any_positive = any_positive || positive;
    }
    const bool any_negative =
        std::find(binary.begin(), binary.end(), -1) != binary.end();
    if (!any_positive || !any_negative) {
      SvmBinary degenerate;
      degenerate.theta.assign(points.cols(), 0.0);
      degenerate.degenerate = true;
      model.machines[c] = std::move(degenerate);
      continue;
    }
    SvmTrainConfig machine_cfg = cfg;
    machine_cfg.seed = derive_seed(cfg.seed, "svm_ovr", c);
    model.machines[c] = train_binary(subset, binary, machine_cfg);
  }
  return model;
}

std::array<double, kNumClasses> predict_scores(const SvmModel& m, std::span<const double> x) {
  std::array<double, kNumClasses> decisions{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    decisions[c] = decision(m.machines[c], x);
  }
  const double peak = *std::max_element(decisions.begin(), decisions.end());
  std::array<double, kNumClasses> scores{};
  double total = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    scores[c] = std::exp(decisions[c] - peak);
    total += scores[c];
  }
  for (double& s : scores) s /= total;
  return scores;
}

}  // namespace ceids

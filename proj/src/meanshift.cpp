#include "ceids/meanshift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ceids/errors.hpp"

namespace ceids {

namespace {

constexpr std::size_t kBandwidthSampleCap = 2000;
constexpr std::size_t kHistogramBins = 50;

struct ModeGroup {
  std::vector<double> centroid_sum;
  std::size_t population = 0;

  double distance_to(std::span<const double> p) const {
    const double pop = static_cast<double>(population);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] - centroid_sum[i] / pop;
      sum += d * d;
    }
    return std::sqrt(sum);
  }

  std::vector<double> centroid() const {
    std::vector<double> c(centroid_sum.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = centroid_sum[i] / static_cast<double>(population);
    }
    return c;
  }
};

// Greedy merge of (point, weight) pairs: a point joins the first group whose
// running centroid is within h/2, otherwise starts a new group. Repeated at
// the group level until no two centroids are that close, which gives the
// pairwise-separation guarantee.
std::vector<ModeGroup> merge_points(const std::vector<std::vector<double>>& points,
                                    const std::vector<std::size_t>& weights, double h) {
  std::vector<ModeGroup> groups;
  const double merge_radius = h / 2.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    bool placed = false;
    for (auto& g : groups) {
      if (g.distance_to(points[p]) <= merge_radius) {
        for (std::size_t i = 0; i < g.centroid_sum.size(); ++i) {
          g.centroid_sum[i] += points[p][i] * static_cast<double>(weights[p]);
        }
        g.population += weights[p];
        placed = true;
        break;
      }
    }
    if (!placed) {
      ModeGroup g;
      g.centroid_sum = points[p];
      for (double& v : g.centroid_sum) v *= static_cast<double>(weights[p]);
      g.population = weights[p];
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

}  // namespace

double estimate_bandwidth(const Matrix& data, std::uint64_t seed) {
  if (data.rows() < 2) fail(ErrorKind::DegenerateData, "bandwidth needs at least two points");

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t third = (data.rows() + 2) / 3;
  const std::size_t take = std::min({std::max<std::size_t>(third, 2),
                                     kBandwidthSampleCap, data.rows()});

  std::vector<double> distances;
  distances.reserve(take * (take - 1) / 2);
  double max_dist = 0.0;
  double min_nonzero = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    for (std::size_t j = i + 1; j < take; ++j) {
      const double d = euclidean_distance(data.row(order[i]), data.row(order[j]));
      distances.push_back(d);
      max_dist = std::max(max_dist, d);
      if (d > 0.0 && (min_nonzero == 0.0 || d < min_nonzero)) min_nonzero = d;
    }
  }
  if (max_dist <= 0.0) {
    fail(ErrorKind::DegenerateData, "all sampled points are identical");
  }

  std::array<std::size_t, kHistogramBins> counts{};
  const double bin_width = max_dist / static_cast<double>(kHistogramBins);
  for (double d : distances) {
    auto bin = static_cast<std::size_t>(d / bin_width);
    if (bin >= kHistogramBins) bin = kHistogramBins - 1;
    counts[bin]++;
  }
  std::size_t best_bin = 0;
  for (std::size_t b = 1; b < kHistogramBins; ++b) {
    if (counts[b] > counts[best_bin]) best_bin = b;
  }
  const double mode = (static_cast<double>(best_bin) + 0.5) * bin_width;
  return mode > 0.0 ? mode : min_nonzero;
}

std::vector<double> shift(std::span<const double> x, const Matrix& data, double h) {
  const double radius_sq = h * h;
  const double two_h_sq = 2.0 * h * h;
  std::vector<double> weighted_sum(x.size(), 0.0);
  double weight_total = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double d_sq = squared_distance(data.row(r), x);
    if (d_sq > radius_sq) continue;
    const double w = std::exp(-d_sq / two_h_sq);
    const auto row = data.row(r);
    for (std::size_t i = 0; i < x.size(); ++i) weighted_sum[i] += w * row[i];
    weight_total += w;
  }
  if (weight_total <= 0.0) {
    fail(ErrorKind::EmptyNeighborhood, "no data point within the bandwidth radius");
  }
  for (double& v : weighted_sum) v /= weight_total;
  return weighted_sum;
}

MeanShiftModel fit(const Matrix& data, double h, double tol, int max_iter) {
  if (data.rows() == 0) fail(ErrorKind::EmptyDataset, "mean-shift needs data");
  if (h <= 0.0) fail(ErrorKind::BadConfig, "bandwidth must be positive");

  // Every data point is a seed; each climbs independently.
  std::vector<std::vector<double>> converged(data.rows());
  parallel_for(data.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::vector<double> point(data.row(r).begin(), data.row(r).end());
      for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> next = shift(point, data, h);
        const double moved = euclidean_distance(next, point);
        point = std::move(next);
        if (moved < tol) break;
      }
      converged[r] = std::move(point);
    }
  });

  std::vector<std::size_t> unit_weights(converged.size(), 1);
  std::vector<ModeGroup> groups = merge_points(converged, unit_weights, h);

  // Re-merge centroids until the h/2 separation invariant holds.
  while (true) {
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> populations;
    centroids.reserve(groups.size());
    for (const auto& g : groups) {
      centroids.push_back(g.centroid());
      populations.push_back(g.population);
    }
    std::vector<ModeGroup> merged = merge_points(centroids, populations, h);
    const bool stable = merged.size() == groups.size();
    groups = std::move(merged);
    if (stable) break;
  }

  std::stable_sort(groups.begin(), groups.end(), [](const ModeGroup& a, const ModeGroup& b) {
    return a.population > b.population;
  });

  MeanShiftModel model;
  model.bandwidth = h;
  model.fit_subsample_size = data.rows();
  model.modes.reserve(groups.size());
  for (const auto& g : groups) model.modes.push_back(g.centroid());
  return model;
}

MeanShiftModel fit_subsampled(const Matrix& data, double h, double tol, int max_iter,
                              std::size_t subsample, std::uint64_t seed) {
  if (subsample == 0 || subsample >= data.rows()) {
    return fit(data, h, tol, max_iter);
  }
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix sample(subsample, data.cols());
  for (std::size_t i = 0; i < subsample; ++i) {
    const auto src = data.row(order[i]);
    std::copy(src.begin(), src.end(), sample.row(i).begin());
  }
  MeanShiftModel model = fit(sample, h, tol, max_iter);
  model.fit_subsample_size = subsample;
  return model;
}

std::size_t nearest_mode(const MeanShiftModel& model, std::span<const double> x) {
  if (model.modes.empty()) fail(ErrorKind::EmptyDataset, "model has no modes");
  std::size_t best = 0;
  double best_d = squared_distance(model.modes[0], x);
  for (std::size_t m = 1; m < model.modes.size(); ++m) {
    const double d = squared_distance(model.modes[m], x);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

Assignment assign(const MeanShiftModel& model, std::span<const double> x) {
  Assignment a;
  a.cluster = nearest_mode(model, x);
  a.membership.assign(model.modes.size(), 0.0);
  a.membership[a.cluster] = 1.0;
  return a;
}

}  // namespace ceids

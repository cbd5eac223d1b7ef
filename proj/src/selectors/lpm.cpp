#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

namespace {

struct FlatPoints {
  std::vector<double> x1, y1, x2, y2;
};

// Per-image, per-axis min-max rescale to the unit square. A collapsed axis
// maps to 0.
FlatPoints flatten(const CorrespondenceSet& set, bool normalize) {
  const std::size_t n = set.size();
  FlatPoints out;
  out.x1.resize(n);
  out.y1.resize(n);
  out.x2.resize(n);
  out.y2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.x1[i] = set.items[i].p.x;
    out.y1[i] = set.items[i].p.y;
    out.x2[i] = set.items[i].q.x;
    out.y2[i] = set.items[i].q.y;
  }
  if (!normalize || n == 0) return out;
  for (auto* axis : {&out.x1, &out.y1, &out.x2, &out.y2}) {
    const auto [lo_it, hi_it] = std::minmax_element(axis->begin(), axis->end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (range > 0.0) {
      for (double& v : *axis) v = (v - lo) / range;
    } else {
      for (double& v : *axis) v = 0.0;
    }
  }
  return out;
}

// Indices of the k nearest neighbors of i (self excluded), distance ties
// resolved toward the lower index.
std::vector<std::size_t> knn_of(const std::vector<double>& xs, const std::vector<double>& ys,
                                std::size_t i, int k) {
  const std::size_t n = xs.size();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double dx = xs[j] - xs[i];
    const double dy = ys[j] - ys[i];
    dist.emplace_back(dx * dx + dy * dy, j);
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<std::size_t> out(kk);
  for (std::size_t m = 0; m < kk; ++m) out[m] = dist[m].second;
  return out;
}

std::vector<double> costs_impl(const FlatPoints& pts, int k) {
  const std::size_t n = pts.x1.size();
  std::vector<double> cost(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    // Neighbors found in image 1, distances measured in image 2 ...
    for (std::size_t j : knn_of(pts.x1, pts.y1, i, k)) {
      c += std::hypot(pts.x2[i] - pts.x2[j], pts.y2[i] - pts.y2[j]);
    }
    // ... and the symmetric half.
    for (std::size_t j : knn_of(pts.x2, pts.y2, i, k)) {
      c += std::hypot(pts.x1[i] - pts.x1[j], pts.y1[i] - pts.y1[j]);
    }
    cost[i] = c;
  }
  return cost;
}

void check_size(const CorrespondenceSet& set, int k) {
  if (k < 1) {
    throw Error(ErrorKind::InvalidInput, "neighborhood size must be positive");
  }
  if (set.size() <= static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::TooFewMatches, "need more matches than neighbors");
  }
}

}  // namespace

double lpm_cost(const CorrespondenceSet& set, std::size_t i, int k, bool normalize) {
  check_size(set, k);
  if (i >= set.size()) {
    throw Error(ErrorKind::InvalidInput, "index out of range");
  }
  const FlatPoints pts = flatten(set, normalize);
  double c = 0.0;
  for (std::size_t j : knn_of(pts.x1, pts.y1, i, k)) {
    c += std::hypot(pts.x2[i] - pts.x2[j], pts.y2[i] - pts.y2[j]);
  }
  for (std::size_t j : knn_of(pts.x2, pts.y2, i, k)) {
    c += std::hypot(pts.x1[i] - pts.x1[j], pts.y1[i] - pts.y1[j]);
  }
  return c;
}

std::vector<double> lpm_costs(const CorrespondenceSet& set, int k, bool normalize) {
  check_size(set, k);
  return costs_impl(flatten(set, normalize), k);
}

double lpm_total_cost(const CorrespondenceSet& set, const std::vector<bool>& selected,
                      double lambda, int k, bool normalize) {
  if (selected.size() != set.size()) {
    throw Error(ErrorKind::InvalidInput, "indicator length mismatch");
  }
  const std::vector<double> cost = lpm_costs(set, k, normalize);
  double total = lambda * static_cast<double>(set.size());
  for (std::size_t i = 0; i < cost.size(); ++i) {
    if (selected[i]) total += cost[i] - lambda;
  }
  return total;
}

SelectionResult select_lpm(const CorrespondenceSet& set, const LpmParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::vector<double> cost = lpm_costs(set, params.k, params.normalize_coords);

  std::vector<double> confidence(cost.size(), 0.0);
  for (std::size_t i = 0; i < cost.size(); ++i) {
    confidence[i] = std::max(0.0, params.lambda_lpm - cost[i]);
    if (cost[i] <= params.lambda_lpm) result.selected.push_back(i);
  }
  result.confidence = std::move(confidence);
  result.iterations_used = 1;
  return result;
}

}  // namespace corrsel

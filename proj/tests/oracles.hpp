#pragma once

// Independent re-derivations used to cross-check the library. Same
// definitions, different code paths: everything here is brute force and
// recomputes from scratch instead of sharing the library's incremental
// bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Exhaustive between-class-variance scan over all 255 interior boundaries of
// a 256-bin histogram on [min, max]. Ties keep the lowest boundary.
inline double otsu_exhaustive(const std::vector<double>& values) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  constexpr int kBins = 256;
  const double width = (hi - lo) / kBins;
  std::vector<double> count(kBins, 0.0);
  for (const double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, kBins - 1);
    count[static_cast<std::size_t>(b)] += 1.0;
  }
  double best_var = -1.0;
  int best_t = 0;
  for (int t = 0; t < kBins - 1; ++t) {
    double w0 = 0.0, w1 = 0.0, m0 = 0.0, m1 = 0.0;
    for (int b = 0; b < kBins; ++b) {
      const double center = lo + (b + 0.5) * width;
      if (b <= t) {
        w0 += count[static_cast<std::size_t>(b)];
        m0 += count[static_cast<std::size_t>(b)] * center;
      } else {
        w1 += count[static_cast<std::size_t>(b)];
        m1 += count[static_cast<std::size_t>(b)] * center;
      }
    }
    if (w0 == 0.0 || w1 == 0.0) continue;
    m0 /= w0;
    m1 /= w1;
    const double var = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return lo + (best_t + 1) * width;
}

// Dominant eigenvector from a full dense eigendecomposition, sign fixed so
// the largest-magnitude entry is positive.
inline Eigen::VectorXd dense_principal(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd v = es.eigenvectors().col(a.cols() - 1);
  int arg = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) v = -v;
  return v;
}

inline double angular_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

// Minimum of L(W) = sum_i w_i (l_i - lambda) + lambda N over all 2^N
// indicator vectors, by enumeration.
inline double lpm_brute_min(const std::vector<double>& costs, double lambda) {
  const int n = static_cast<int>(costs.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double total = lambda * n;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) total += costs[static_cast<std::size_t>(i)] - lambda;
    }
    best = std::min(best, total);
  }
  return best;
}

// Plain-loop replicator dynamics q <- q .* (Pq) / (q'Pq).
inline std::vector<double> replicator(const std::vector<std::vector<double>>& payoff,
                                      int iterations) {
  const std::size_t n = payoff.size();
  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> pq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) pq[i] += payoff[i][j] * q[j];
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += q[i] * pq[i];
    if (denom <= 0.0) return q;
    for (std::size_t i = 0; i < n; ++i) q[i] = q[i] * pq[i] / denom;
  }
  return q;
}

}  // namespace oracle

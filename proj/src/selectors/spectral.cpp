#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

Eigen::MatrixXd st_affinity(const CorrespondenceSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ci = set.items[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& cj = set.items[static_cast<std::size_t>(j)];
      const double d1 = std::hypot(ci.p.x - cj.p.x, ci.p.y - cj.p.y);
      const double d2 = std::hypot(ci.q.x - cj.q.x, ci.q.y - cj.q.y);
      // Coincident keypoints give no usable length ratio.
      const double v = (d1 <= 0.0 || d2 <= 0.0) ? 0.0 : std::min(d1 / d2, d2 / d1);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

SelectionResult select_st(const CorrespondenceSet& set, const StParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  if (n == 0) return result;

  const Eigen::MatrixXd a = st_affinity(set);
  if (a.isZero(0.0)) {
    // No pair carries affinity; nothing can support anything.
    result.flags.emplace_back("zero-affinity");
    result.confidence = std::vector<double>(n, 0.0);
    return result;
  }

  // Full symmetric eigendecomposition; the top eigenvector scores how much
  // total affinity each match shares with the dominant consistent group.
  // Iterative schemes stall when the leading eigenvalues cluster, so the
  // dense solver is used despite its cubic cost.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::SolveFailure, "eigendecomposition failed");
  }
  Eigen::VectorXd v = eig.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);
  double sum = v.sum();
  if (sum < 0.0) v = -v;
  // The principal eigenvector of a nonnegative matrix is nonnegative; clip
  // the rounding fuzz.
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::max(v(i), 0.0);

  std::vector<double> confidence(n);
  for (std::size_t i = 0; i < n; ++i) confidence[i] = v(static_cast<Eigen::Index>(i));

  // Greedy peak picking: take the highest-scoring match, drop everything in
  // conflict with it (affinity at or below t_st), repeat until the score mass
  // is exhausted.
  std::vector<double> score = confidence;
  std::vector<std::size_t> picked;
  while (true) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (score[i] > best) {
        best = score[i];
        arg = i;
      }
    }
    if (best <= 0.0) break;
    picked.push_back(arg);
    score[arg] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (score[j] > 0.0 &&
          a(static_cast<Eigen::Index>(arg), static_cast<Eigen::Index>(j)) <= params.t_st) {
        score[j] = 0.0;
      }
    }
  }

  std::sort(picked.begin(), picked.end());
  result.selected = std::move(picked);
  result.confidence = std::move(confidence);
  result.iterations_used = 1;
  return result;
}

}  // namespace corrsel

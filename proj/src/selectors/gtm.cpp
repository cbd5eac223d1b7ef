#include <cmath>
#include <vector>

#include "corrsel/geometry.hpp"
#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

double gtm_payoff(const Correspondence& ci, const Correspondence& cj, double lambda) {
  if (!ci.affine || !cj.affine) {
    throw Error(ErrorKind::MissingAffine, "payoff needs local frames on both matches");
  }
  // T_i(x) = q_i + A_i (x - p_i); measure how far the two local maps diverge
  // at both keypoints, in L1.
  const auto map = [](const Correspondence& c, Point2 x) {
    return c.q + c.affine->apply(x - c.p);
  };
  const Point2 di = map(ci, ci.p) - map(cj, ci.p);
  const Point2 dj = map(ci, cj.p) - map(cj, cj.p);
  const double l1_i = std::fabs(di.x) + std::fabs(di.y);
  const double l1_j = std::fabs(dj.x) + std::fabs(dj.y);
  return std::exp(-lambda * std::max(l1_i, l1_j));
}

SelectionResult select_gtm(const CorrespondenceSet& set, const GtmParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  if (n == 0) return result;
  for (const auto& c : set.items) {
    if (!c.affine) {
      throw Error(ErrorKind::MissingAffine, "correspondence lacks a local frame");
    }
  }
  if (n == 1) {
    // A single match has no opponent; keep it but say so.
    result.selected.push_back(0);
    result.confidence = std::vector<double>{1.0};
    result.flags.emplace_back("degenerate");
    return result;
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd payoff = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = i + 1; j < ni; ++j) {
      const double v = gtm_payoff(set.items[static_cast<std::size_t>(i)],
                                  set.items[static_cast<std::size_t>(j)], params.lambda_gtm);
      payoff(i, j) = v;
      payoff(j, i) = v;
    }
  }

  // Replicator dynamics from the barycenter. Stays on the simplex as long as
  // the mean payoff is positive.
  Eigen::VectorXd q = Eigen::VectorXd::Constant(ni, 1.0 / static_cast<double>(n));
  int iterations = 0;
  for (int it = 0; it < params.n_gtm; ++it) {
    const Eigen::VectorXd pq = payoff * q;
    const double mean_payoff = q.dot(pq);
    if (mean_payoff <= 0.0) {
      result.flags.emplace_back("degenerate-payoff");
      result.confidence = std::vector<double>(n, 0.0);
      result.iterations_used = iterations;
      return result;
    }
    const Eigen::VectorXd next = q.cwiseProduct(pq) / mean_payoff;
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = next;
    ++iterations;
    if (delta < 1e-9) break;
  }
  result.iterations_used = iterations;

  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = q(static_cast<Eigen::Index>(i));

  double threshold;
  bool select_all = false;
  if (params.t_gtm) {
    threshold = *params.t_gtm;
  } else {
    try {
      threshold = otsu_threshold(mass);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSeparation) throw;
      // Population mass never differentiated; keep everything.
      result.flags.emplace_back("no-separation");
      select_all = true;
      threshold = 0.0;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (select_all || mass[i] > threshold) result.selected.push_back(i);
  }
  result.confidence = std::move(mass);
  return result;
}

}  // namespace corrsel

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSigmaFloor = 1e-8;

struct Field {
  Eigen::MatrixX2d u;  // normalized keypoint positions
  Eigen::MatrixX2d v;  // normalized displacements
  double area = 1.0;   // uniform-component support in normalized v space
};

// Zero-mean, unit-mean-norm rescale of a point cloud; a collapsed cloud
// passes through centered only.
void normalize_cloud(Eigen::MatrixX2d& pts) {
  const Eigen::RowVector2d mean = pts.colwise().mean();
  pts.rowwise() -= mean;
  const double scale = pts.rowwise().norm().mean();
  if (scale > 1e-12) pts /= scale;
}

Field build_field(const CorrespondenceSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  Field f;
  f.u.resize(n, 2);
  f.v.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = set.items[static_cast<std::size_t>(i)];
    f.u(i, 0) = c.p.x;
    f.u(i, 1) = c.p.y;
    f.v(i, 0) = c.q.x - c.p.x;
    f.v(i, 1) = c.q.y - c.p.y;
  }
  normalize_cloud(f.u);
  normalize_cloud(f.v);

  // Uniform component lives on the displacement bounding box, 10% margin per
  // dimension. Degenerate boxes (noise-free single motions) get a small
  // floor so the uniform density cannot blow up.
  const double w = std::max(f.v.col(0).maxCoeff() - f.v.col(0).minCoeff(), 0.01);
  const double h = std::max(f.v.col(1).maxCoeff() - f.v.col(1).minCoeff(), 0.01);
  f.area = 1.1 * w * 1.1 * h;
  return f;
}

}  // namespace

double vfc_posterior(double r2, double gamma, double sigma2, double a) {
  const double coherent = gamma * std::exp(-r2 / (2.0 * sigma2));
  const double uniform = (1.0 - gamma) * kTwoPi * sigma2 / a;
  const double den = coherent + uniform;
  return den > 0.0 ? coherent / den : 0.0;
}

VfcFit vfc_fit(const CorrespondenceSet& set, const VfcParams& params) {
  VfcFit fit;
  const auto n = static_cast<Eigen::Index>(set.size());
  if (n == 0) return fit;

  const Field field = build_field(set);

  // Basis of the displacement field: all sample points when they fit, else an
  // evenly strided subset; the dense solve is cubic in the basis size.
  const Eigen::Index m = std::min<Eigen::Index>(n, std::max(1, params.max_basis));
  const bool reduced = m < n;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index b = 0; b < m; ++b) {
    basis[static_cast<std::size_t>(b)] = b * n / m;
  }

  // k(u, u') = exp(-beta |u - u'|^2); constant across EM iterations.
  Eigen::MatrixXd k_nb(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double d2 = (field.u.row(i) - field.u.row(basis[static_cast<std::size_t>(b)]))
                            .squaredNorm();
      k_nb(i, b) = std::exp(-params.beta * d2);
    }
  }
  Eigen::MatrixXd k_bb;
  if (reduced) {
    k_bb.resize(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        k_bb(r, c) = k_nb(basis[static_cast<std::size_t>(r)], c);
      }
    }
  }

  Eigen::MatrixX2d f_val = Eigen::MatrixX2d::Zero(n, 2);
  Eigen::VectorXd posterior = Eigen::VectorXd::Zero(n);
  double gamma = params.gamma0;
  double sigma2 = std::max(field.v.squaredNorm() / (2.0 * static_cast<double>(n)), kSigmaFloor);

  bool converged = false;
  int it = 0;
  while (it < params.max_em_iters) {
    ++it;

    // E-step: posterior of the coherent component per match.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r2 = (field.v.row(i) - f_val.row(i)).squaredNorm();
      posterior(i) = vfc_posterior(r2, gamma, sigma2, field.area);
    }
    const double tr_p = posterior.sum();
    if (tr_p <= static_cast<double>(n) * 1e-12) {
      // Everything rejected; the coherent component vanished.
      gamma = 0.0;
      converged = true;
      break;
    }

    // M-step: weighted regularized solve for the field coefficients.
    Eigen::MatrixX2d coeff;
    if (!reduced) {
      const Eigen::MatrixXd lhs =
          posterior.asDiagonal() * k_nb +
          params.lambda_vfc * sigma2 * Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixX2d rhs = posterior.asDiagonal() * field.v;
      coeff = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(rhs);
    } else {
      const Eigen::MatrixXd weighted = posterior.cwiseSqrt().asDiagonal() * k_nb;
      const Eigen::MatrixXd lhs = weighted.transpose() * weighted +
                                  params.lambda_vfc * sigma2 * k_bb +
                                  1e-10 * Eigen::MatrixXd::Identity(m, m);
      const Eigen::MatrixX2d rhs = k_nb.transpose() * (posterior.asDiagonal() * field.v);
      coeff = Eigen::LDLT<Eigen::MatrixXd>(lhs).solve(rhs);
    }
    if (!coeff.allFinite()) {
      throw Error(ErrorKind::SolveFailure, "field solve produced non-finite coefficients");
    }
    f_val = k_nb * coeff;

    double weighted_residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      weighted_residual += posterior(i) * (field.v.row(i) - f_val.row(i)).squaredNorm();
    }
    const double sigma2_new = std::max(weighted_residual / (2.0 * tr_p), kSigmaFloor);
    const double gamma_new = tr_p / static_cast<double>(n);

    const bool settled = std::fabs(gamma_new - gamma) < params.tol &&
                         std::fabs(sigma2_new - sigma2) < params.tol * sigma2;
    gamma = gamma_new;
    sigma2 = sigma2_new;
    if (settled) {
      converged = true;
      break;
    }
  }

  // Final posteriors under the settled parameters.
  fit.posterior.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r2 = (field.v.row(i) - f_val.row(i)).squaredNorm();
    fit.posterior[static_cast<std::size_t>(i)] = vfc_posterior(r2, gamma, sigma2, field.area);
  }
  fit.gamma = gamma;
  fit.sigma2 = sigma2;
  fit.iterations = it;
  fit.converged = converged;
  return fit;
}

SelectionResult select_vfc(const CorrespondenceSet& set, const VfcParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const VfcFit fit = vfc_fit(set, params);
  result.iterations_used = fit.iterations;
  if (!fit.converged) result.flags.emplace_back("unconverged");

  for (std::size_t i = 0; i < fit.posterior.size(); ++i) {
    if (fit.posterior[i] > params.t_vfc) result.selected.push_back(i);
  }
  result.confidence = fit.posterior;
  return result;
}

}  // namespace corrsel

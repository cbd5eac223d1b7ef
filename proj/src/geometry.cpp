#include "corrsel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/SVD>

namespace corrsel {

namespace {

std::array<double, 9> to_array(const Eigen::Matrix3d& m) {
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

// Similarity moving the centroid to the origin and the mean distance to
// sqrt(2). Throws when all points coincide.
Eigen::Matrix3d hartley_transform(std::span<const Correspondence> pts, bool second_image) {
  const double n = static_cast<double>(pts.size());
  double cx = 0.0, cy = 0.0;
  for (const auto& c : pts) {
    const Point2 p = second_image ? c.q : c.p;
    cx += p.x;
    cy += p.y;
  }
  cx /= n;
  cy /= n;

  double mean_dist = 0.0;
  for (const auto& c : pts) {
    const Point2 p = second_image ? c.q : c.p;
    mean_dist += std::hypot(p.x - cx, p.y - cy);
  }
  mean_dist /= n;
  if (mean_dist < kProjEps) {
    throw Error(ErrorKind::DegenerateSample, "coincident points");
  }
  const double s = std::sqrt(2.0) / mean_dist;

  Eigen::Matrix3d t;
  t << s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0;
  return t;
}

Point2 apply3(const Eigen::Matrix3d& t, Point2 p) {
  // Similarity transforms only: bottom row is (0, 0, 1).
  return {t(0, 0) * p.x + t(0, 1) * p.y + t(0, 2), t(1, 0) * p.x + t(1, 1) * p.y + t(1, 2)};
}

// Smallest right singular vector, with a uniqueness check on the next
// singular value up. The solution direction is only determined when the
// design matrix has rank exactly one below its column count.
Eigen::VectorXd null_vector(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index k = sv.size();
  if (k < 8 || sv(7) <= 1e-10 * sv(0)) {
    throw Error(ErrorKind::DegenerateSample, "rank-deficient design matrix");
  }
  return svd.matrixV().col(a.cols() - 1);
}

}  // namespace

Point2 project(const Homography& h, Point2 p) {
  const double w = h.m[6] * p.x + h.m[7] * p.y + h.m[8];
  if (std::fabs(w) <= kProjEps) {
    throw Error(ErrorKind::PointAtInfinity, "projective scale underflow");
  }
  const double u = h.m[0] * p.x + h.m[1] * p.y + h.m[2];
  const double v = h.m[3] * p.x + h.m[4] * p.y + h.m[5];
  return {u / w, v / w};
}

double homography_residual(const Homography& h, const Correspondence& c) {
  const Point2 r = project(h, c.p);
  return std::hypot(c.q.x - r.x, c.q.y - r.y);
}

LocalAffine homography_jacobian(const Homography& h, Point2 p) {
  const double w = h.m[6] * p.x + h.m[7] * p.y + h.m[8];
  if (std::fabs(w) <= kProjEps) {
    throw Error(ErrorKind::PointAtInfinity, "projective scale underflow");
  }
  const double u = h.m[0] * p.x + h.m[1] * p.y + h.m[2];
  const double v = h.m[3] * p.x + h.m[4] * p.y + h.m[5];
  const double iw = 1.0 / w;
  // d(u/w)/dx = (u_x w - u w_x) / w^2 and friends.
  LocalAffine a;
  a.a11 = (h.m[0] * w - u * h.m[6]) * iw * iw;
  a.a12 = (h.m[1] * w - u * h.m[7]) * iw * iw;
  a.a21 = (h.m[3] * w - v * h.m[6]) * iw * iw;
  a.a22 = (h.m[4] * w - v * h.m[7]) * iw * iw;
  return a;
}

Homography estimate_homography(std::span<const Correspondence> pts) {
  const std::size_t n = pts.size();
  if (n < 4) {
    throw Error(ErrorKind::TooFewMatches, "homography needs 4 correspondences");
  }
  const Eigen::Matrix3d t1 = hartley_transform(pts, false);
  const Eigen::Matrix3d t2 = hartley_transform(pts, true);

  Eigen::MatrixXd a(2 * static_cast<Eigen::Index>(n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = apply3(t1, pts[i].p);
    const Point2 q = apply3(t2, pts[i].q);
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -p.x, -p.y, -1.0, 0.0, 0.0, 0.0, q.x * p.x, q.x * p.y, q.x;
    a.row(r + 1) << 0.0, 0.0, 0.0, -p.x, -p.y, -1.0, q.y * p.x, q.y * p.y, q.y;
  }

  const Eigen::VectorXd h = null_vector(a);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  const Eigen::Matrix3d raw = t2.inverse() * hn * t1;
  return Homography::from(to_array(raw));
}

Fundamental estimate_fundamental(std::span<const Correspondence> pts) {
  const std::size_t n = pts.size();
  if (n < 8) {
    throw Error(ErrorKind::TooFewMatches, "fundamental matrix needs 8 correspondences");
  }
  const Eigen::Matrix3d t1 = hartley_transform(pts, false);
  const Eigen::Matrix3d t2 = hartley_transform(pts, true);

  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = apply3(t1, pts[i].p);
    const Point2 q = apply3(t2, pts[i].q);
    a.row(static_cast<Eigen::Index>(i)) << q.x * p.x, q.x * p.y, q.x, q.y * p.x, q.y * p.y,
        q.y, p.x, p.y, 1.0;
  }

  const Eigen::VectorXd f = null_vector(a);
  Eigen::Matrix3d fn;
  fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

  // Project onto the rank-2 cone before undoing the normalization.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();
  sv(2) = 0.0;
  const Eigen::Matrix3d fr = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();

  const Eigen::Matrix3d raw = t2.transpose() * fr * t1;
  return Fundamental::from(to_array(raw));
}

double sampson_like_residual(const Fundamental& f, const Correspondence& c) {
  const double px = c.p.x, py = c.p.y;
  const double qx = c.q.x, qy = c.q.y;

  const double fp0 = f.m[0] * px + f.m[1] * py + f.m[2];
  const double fp1 = f.m[3] * px + f.m[4] * py + f.m[5];
  const double fp2 = f.m[6] * px + f.m[7] * py + f.m[8];

  const double ftq0 = f.m[0] * qx + f.m[3] * qy + f.m[6];
  const double ftq1 = f.m[1] * qx + f.m[4] * qy + f.m[7];

  const double qfp = qx * fp0 + qy * fp1 + fp2;
  const double den = fp0 * fp0 + fp1 * fp1 + ftq0 * ftq0 + ftq1 * ftq1;
  if (den <= kProjEps * kProjEps) {
    throw Error(ErrorKind::PointAtInfinity, "epipolar gradient underflow");
  }
  return qfp * qfp / den;
}

double model_residual(const ProjectiveModel& model, const Correspondence& c) {
  if (const auto* h = std::get_if<Homography>(&model)) {
    return homography_residual(*h, c);
  }
  return std::sqrt(sampson_like_residual(std::get<Fundamental>(model), c));
}

double otsu_threshold(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorKind::NoSeparation, "need at least two values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(ErrorKind::NoSeparation, "all values equal");
  }

  constexpr int kBins = 256;
  const double width = (hi - lo) / kBins;
  std::array<double, kBins> count{};
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, kBins - 1);  // v == hi lands past the last bin
    count[static_cast<std::size_t>(b)] += 1.0;
  }

  const double total = static_cast<double>(values.size());
  double total_mass = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double center = lo + (b + 0.5) * width;
    total_mass += count[static_cast<std::size_t>(b)] * center;
  }

  // Split after bin t: class 0 = bins [0, t], class 1 = the rest. Strict
  // comparison keeps the first (lowest) maximizer.
  double best_var = -1.0;
  int best_t = 0;
  double w0 = 0.0, mass0 = 0.0;
  for (int t = 0; t < kBins - 1; ++t) {
    const double center = lo + (t + 0.5) * width;
    w0 += count[static_cast<std::size_t>(t)];
    mass0 += count[static_cast<std::size_t>(t)] * center;
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = mass0 / w0;
    const double mu1 = (total_mass - mass0) / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return lo + (best_t + 1) * width;
}

PrincipalEigen principal_eigenvector(const Eigen::MatrixXd& a) {
  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 1000;

  const Eigen::Index n = a.rows();
  if (n == 0 || a.isZero(0.0)) {
    throw Error(ErrorKind::ZeroMatrix, "matrix has no principal direction");
  }

  PrincipalEigen out;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 1; it <= kMaxIter; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      throw Error(ErrorKind::ZeroMatrix, "iterate annihilated");
    }
    w /= norm;
    const double step = (w - v).norm();
    v = std::move(w);
    out.iterations = it;
    if (step < kTol) {
      out.converged = true;
      break;
    }
  }

  Eigen::Index max_idx = 0;
  v.cwiseAbs().maxCoeff(&max_idx);
  if (v(max_idx) < 0.0) v = -v;
  out.v = std::move(v);
  return out;
}

}  // namespace corrsel

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "corrsel/types.hpp"

namespace corrsel {

// Applies the projective transform and dehomogenizes. Throws PointAtInfinity
// when the homogeneous scale falls below kProjEps.
Point2 project(const Homography& h, Point2 p);

// Euclidean distance in image 2 between q and the projection of p.
double homography_residual(const Homography& h, const Correspondence& c);

// First-order Taylor expansion of the projective map around p.
LocalAffine homography_jacobian(const Homography& h, Point2 p);

// Normalized DLT. Both point sets are translated to the origin and scaled to
// mean distance sqrt(2) before the linear solve; the result is denormalized
// and canonicalized. Throws DegenerateSample when the design matrix does not
// determine a unique solution (e.g. three collinear points in a minimal set).
Homography estimate_homography(std::span<const Correspondence> pts);

// Normalized eight-point estimate with rank-2 enforcement (smallest singular
// value of the 3x3 matrix zeroed before denormalization).
Fundamental estimate_fundamental(std::span<const Correspondence> pts);

// First-order point-to-epipolar error:
//   (q^T F p)^2 / ((Fp)_1^2 + (Fp)_2^2 + (F^T q)_1^2 + (F^T q)_2^2)
// in homogeneous coordinates. Throws PointAtInfinity when the denominator
// underflows kProjEps^2.
double sampson_like_residual(const Fundamental& f, const Correspondence& c);

// Pixel-scale residual for either model kind: Euclidean reprojection error
// for a homography, sqrt of the epipolar quotient for a fundamental matrix.
double model_residual(const ProjectiveModel& model, const Correspondence& c);

// Histogram-based two-class threshold. Values are binned into 256 equal-width
// bins over [min, max]; the returned boundary maximizes the between-class
// variance, ties resolved toward the lower boundary. Throws NoSeparation when
// fewer than two distinct values are present.
double otsu_threshold(std::span<const double> values);

struct PrincipalEigen {
  Eigen::VectorXd v;       // unit norm, sign fixed so the largest entry is positive
  bool converged = false;
  int iterations = 0;
};

// Power iteration from the uniform start vector, tolerance 1e-8 on the
// distance between successive normalized iterates, at most 1000 iterations.
// Intended for symmetric nonnegative matrices. Throws ZeroMatrix on an
// all-zero input; a non-converged run returns the last iterate with
// converged = false.
PrincipalEigen principal_eigenvector(const Eigen::MatrixXd& a);

}  // namespace corrsel

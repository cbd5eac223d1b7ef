#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace corrsel {

// Shared denominator guard for projective divisions.
inline constexpr double kProjEps = 1e-12;

enum class ErrorKind {
  DegenerateModel,
  PointAtInfinity,
  DegenerateSample,
  NoSeparation,
  ZeroMatrix,
  MissingQuality,
  MissingAffine,
  TooFewMatches,
  NoModel,
  SolveFailure,
  InvalidInput,
  GenerationFailure,
  MissingGroundTruth,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }

// Row-major 2x2 linearization of the local mapping around a keypoint.
struct LocalAffine {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }

  Point2 apply(Point2 v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
};

// One putative match between the two images. p lives in image 1, q in
// image 2. quality is a matcher distance ratio (lower is better), affine the
// local frame around p, gt_label the generator's inlier/outlier verdict; all
// three are optional and selectors that need one fail loudly when it is
// missing.
struct Correspondence {
  Point2 p;
  Point2 q;
  std::optional<double> quality;
  std::optional<LocalAffine> affine;
  std::optional<bool> gt_label;
};

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

struct CorrespondenceSet {
  std::string name;
  ImageSize image1;
  ImageSize image2;
  std::vector<Correspondence> items;

  std::size_t size() const { return items.size(); }
};

// Scales a 9-vector to unit Frobenius norm and flips the sign so the last
// nonzero entry is positive. The all-zero vector has no canonical form.
std::array<double, 9> canonicalize_model(const std::array<double, 9>& m);

// Plane projective transform, row-major, always stored canonicalized.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography from(const std::array<double, 9>& raw) {
    return Homography{canonicalize_model(raw)};
  }

  double at(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
};

// Epipolar constraint matrix, row-major, rank <= 2, canonical scale. Rank
// enforcement happens in the estimator; from() only normalizes.
struct Fundamental {
  std::array<double, 9> m{};

  static Fundamental from(const std::array<double, 9>& raw) {
    return Fundamental{canonicalize_model(raw)};
  }

  double at(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
};

using ProjectiveModel = std::variant<Homography, Fundamental>;

// Outcome of one selector run. selected is strictly increasing and duplicate
// free; confidence, when present, has one entry per input correspondence.
struct SelectionResult {
  std::vector<std::size_t> selected;
  std::optional<std::vector<double>> confidence;
  std::optional<ProjectiveModel> model;
  int iterations_used = 0;
  std::chrono::nanoseconds runtime{0};
  std::vector<std::string> flags;
};

}  // namespace corrsel

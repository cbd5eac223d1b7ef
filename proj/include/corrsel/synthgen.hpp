#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "corrsel/rng.hpp"
#include "corrsel/types.hpp"

namespace corrsel {

// Scene transform menu. Every variant fixes the exact image-2 position of an
// inlier keypoint before noise.
struct RandomPerspective {};       // mild projective warp drawn from the seed
struct Rotation { double degrees = 0.0; };   // about the image centers
struct Zoom { double factor = 1.0; };        // about the image centers
struct Translation { double dx = 0.0, dy = 0.0; };

struct Structure {
  Homography h;
  double weight = 1.0;
};

// Several motions in one scene, laid out in vertical bands of the image-1
// frame proportional to the weights. Weights must be positive and sum to 1.
struct MultiStructure {
  std::vector<Structure> structures;
};

using TransformSpec = std::variant<RandomPerspective, Rotation, Zoom, Translation, MultiStructure>;

enum class QualityModel {
  Correlated,    // inliers draw lower (better) ratios than outliers
  Uncorrelated,  // everyone draws from the same uniform
};

struct SceneSpec {
  int n = 1000;
  double inlier_ratio = 0.5;   // in (0, 1]
  double noise_sigma = 1.0;    // isotropic Gaussian on image-2 positions, pixels
  TransformSpec transform = Translation{};
  ImageSize image1{800.0, 600.0};
  ImageSize image2{800.0, 600.0};
  QualityModel quality_model = QualityModel::Correlated;
  bool affine_frames = false;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  enum class Kind { Homography, Labels };
  Kind kind = Kind::Homography;
  std::optional<Homography> h;  // set iff kind == Homography
  std::vector<bool> labels;     // set iff kind == Labels
};

struct Scene {
  CorrespondenceSet set;
  GroundTruth gt;
};

// Mild random projective warp: the four frame corners move by up to 15% of
// the smaller image-1 dimension.
Homography random_perspective(Rng& rng, const ImageSize& from, const ImageSize& to);

// Deterministic scene synthesis. ceil(n * inlier_ratio) inliers are sampled
// uniformly in the image-1 frame, pushed through their structure's transform
// and jittered; draws landing outside the 10%-expanded image-2 frame are
// retried. Outliers pair a uniform image-1 point with a uniform image-2
// point at least 10px of residual away from every structure, so the
// generator's labels agree with residual labeling at the usual thresholds.
// Inliers come first in the output. Throws GenerationFailure after 100 * n
// rejected draws.
Scene generate_scene(const SceneSpec& spec);

// Residual-based labels: true where the reprojection error is at most t_gt.
// Points the model maps to infinity label false.
std::vector<bool> label_against_homography(const CorrespondenceSet& set, const Homography& h,
                                           double t_gt);

}  // namespace corrsel

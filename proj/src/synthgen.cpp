#include "corrsel/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "corrsel/geometry.hpp"

namespace corrsel {

namespace {

// Residual clearance between generated outliers and every structure; keeps
// construction labels and residual labels in agreement up to this threshold.
constexpr double kOutlierClearance = 10.0;

Homography translation_h(double dx, double dy) {
  return Homography::from({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

Homography about_centers(const ImageSize& from, const ImageSize& to, double a, double b,
                         double c, double d) {
  // T(center2) * [[a b],[c d]] * T(-center1)
  const double cx1 = from.width / 2.0, cy1 = from.height / 2.0;
  const double cx2 = to.width / 2.0, cy2 = to.height / 2.0;
  return Homography::from({a, b, cx2 - a * cx1 - b * cy1,
                           c, d, cy2 - c * cx1 - d * cy1,
                           0, 0, 1});
}

std::string transform_tag(const TransformSpec& t) {
  char buf[96];
  if (std::holds_alternative<RandomPerspective>(t)) return "perspective";
  if (const auto* r = std::get_if<Rotation>(&t)) {
    std::snprintf(buf, sizeof buf, "rotation(%g)", r->degrees);
    return buf;
  }
  if (const auto* z = std::get_if<Zoom>(&t)) {
    std::snprintf(buf, sizeof buf, "zoom(%g)", z->factor);
    return buf;
  }
  if (const auto* tr = std::get_if<Translation>(&t)) {
    std::snprintf(buf, sizeof buf, "translation(%g,%g)", tr->dx, tr->dy);
    return buf;
  }
  const auto& ms = std::get<MultiStructure>(t);
  std::snprintf(buf, sizeof buf, "multi(%zu)", ms.structures.size());
  return buf;
}

LocalAffine random_affine(Rng& rng) {
  // Any well-conditioned 2x2 will do for an outlier's local frame.
  for (int i = 0; i < 100; ++i) {
    LocalAffine a;
    a.a11 = rng.uniform(-1.5, 1.5);
    a.a12 = rng.uniform(-1.5, 1.5);
    a.a21 = rng.uniform(-1.5, 1.5);
    a.a22 = rng.uniform(-1.5, 1.5);
    if (std::fabs(a.det()) > 0.1) return a;
  }
  return LocalAffine{};
}

}  // namespace

Homography random_perspective(Rng& rng, const ImageSize& from, const ImageSize& to) {
  const double reach = 0.15 * std::min(from.width, from.height);
  const std::array<Point2, 4> corners{{{0.0, 0.0},
                                       {from.width, 0.0},
                                       {0.0, from.height},
                                       {from.width, from.height}}};
  std::array<Correspondence, 4> pairs{};
  const double sx = to.width / from.width;
  const double sy = to.height / from.height;
  for (std::size_t i = 0; i < 4; ++i) {
    pairs[i].p = corners[i];
    pairs[i].q = {corners[i].x * sx + rng.uniform(-reach, reach),
                  corners[i].y * sy + rng.uniform(-reach, reach)};
  }
  return estimate_homography(pairs);
}

std::vector<bool> label_against_homography(const CorrespondenceSet& set, const Homography& h,
                                           double t_gt) {
  std::vector<bool> labels(set.size(), false);
  for (std::size_t i = 0; i < set.size(); ++i) {
    try {
      labels[i] = homography_residual(h, set.items[i]) <= t_gt;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PointAtInfinity) throw;
    }
  }
  return labels;
}

Scene generate_scene(const SceneSpec& spec) {
  if (spec.n < 1 || !(spec.inlier_ratio > 0.0) || spec.inlier_ratio > 1.0 ||
      spec.noise_sigma < 0.0 || spec.image1.width <= 0.0 || spec.image1.height <= 0.0 ||
      spec.image2.width <= 0.0 || spec.image2.height <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "scene spec out of range");
  }

  Rng rng(spec.seed);

  // Resolve the transform into banded structures over the image-1 x axis.
  std::vector<Structure> structures;
  if (const auto* ms = std::get_if<MultiStructure>(&spec.transform)) {
    if (ms->structures.empty()) {
      throw Error(ErrorKind::InvalidInput, "no structures");
    }
    double total = 0.0;
    for (const auto& s : ms->structures) {
      if (!(s.weight > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "structure weights must be positive");
      }
      total += s.weight;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidInput, "structure weights must sum to 1");
    }
    structures = ms->structures;
  } else if (std::holds_alternative<RandomPerspective>(spec.transform)) {
    structures.push_back({random_perspective(rng, spec.image1, spec.image2), 1.0});
  } else if (const auto* r = std::get_if<Rotation>(&spec.transform)) {
    const double rad = r->degrees * 0.017453292519943295;
    structures.push_back({about_centers(spec.image1, spec.image2, std::cos(rad), -std::sin(rad),
                                        std::sin(rad), std::cos(rad)),
                          1.0});
  } else if (const auto* z = std::get_if<Zoom>(&spec.transform)) {
    if (!(z->factor > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "zoom factor must be positive");
    }
    structures.push_back({about_centers(spec.image1, spec.image2, z->factor, 0, 0, z->factor), 1.0});
  } else {
    const auto& tr = std::get<Translation>(spec.transform);
    structures.push_back({translation_h(tr.dx, tr.dy), 1.0});
  }
  const bool multi = structures.size() > 1;

  // Band boundaries for structure assignment by image-1 x position.
  std::vector<double> cumulative{0.0};
  for (const auto& s : structures) cumulative.push_back(cumulative.back() + s.weight);
  const auto structure_at = [&](double x) {
    const double t = x / spec.image1.width;
    for (std::size_t s = 0; s + 1 < cumulative.size(); ++s) {
      if (t < cumulative[s + 1] || s + 2 == cumulative.size()) return s;
    }
    return structures.size() - 1;
  };

  const int n_in = static_cast<int>(std::ceil(spec.inlier_ratio * spec.n));
  const int n_out = spec.n - n_in;

  const long attempt_cap = 100L * spec.n;
  long attempts = 0;
  const auto spend_attempt = [&] {
    if (++attempts > attempt_cap) {
      throw Error(ErrorKind::GenerationFailure, "rejected draw budget exhausted");
    }
  };

  const double margin_x = 0.05 * spec.image2.width;
  const double margin_y = 0.05 * spec.image2.height;

  CorrespondenceSet set;
  set.image1 = spec.image1;
  set.image2 = spec.image2;
  set.items.reserve(static_cast<std::size_t>(spec.n));

  const auto min_structure_residual = [&](const Correspondence& c) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : structures) {
      try {
        best = std::min(best, homography_residual(s.h, c));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PointAtInfinity) throw;
      }
    }
    return best;
  };

  for (int i = 0; i < n_in; ++i) {
    while (true) {
      spend_attempt();
      Correspondence c;
      c.p = {rng.uniform(0.0, spec.image1.width), rng.uniform(0.0, spec.image1.height)};
      const std::size_t s = structure_at(c.p.x);
      Point2 mapped;
      try {
        mapped = project(structures[s].h, c.p);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PointAtInfinity) throw;
        continue;
      }
      c.q = {mapped.x + rng.normal(0.0, spec.noise_sigma),
             mapped.y + rng.normal(0.0, spec.noise_sigma)};
      if (c.q.x < -margin_x || c.q.x > spec.image2.width + margin_x || c.q.y < -margin_y ||
          c.q.y > spec.image2.height + margin_y) {
        continue;
      }
      c.quality = spec.quality_model == QualityModel::Correlated ? rng.uniform(0.3, 0.75)
                                                                 : rng.uniform(0.0, 1.0);
      if (spec.affine_frames) c.affine = homography_jacobian(structures[s].h, c.p);
      c.gt_label = true;
      set.items.push_back(c);
      break;
    }
  }

  for (int i = 0; i < n_out; ++i) {
    while (true) {
      spend_attempt();
      Correspondence c;
      c.p = {rng.uniform(0.0, spec.image1.width), rng.uniform(0.0, spec.image1.height)};
      c.q = {rng.uniform(0.0, spec.image2.width), rng.uniform(0.0, spec.image2.height)};
      // A random pairing that happens to agree with a structure would poison
      // the labels; push it away.
      if (min_structure_residual(c) <= kOutlierClearance) continue;
      c.quality = spec.quality_model == QualityModel::Correlated ? rng.uniform(0.6, 1.0)
                                                                 : rng.uniform(0.0, 1.0);
      if (spec.affine_frames) c.affine = random_affine(rng);
      c.gt_label = false;
      set.items.push_back(c);
      break;
    }
  }

  char name[160];
  std::snprintf(name, sizeof name, "%s-n%d-r%g-sigma%g-seed%llu", transform_tag(spec.transform).c_str(),
                spec.n, spec.inlier_ratio, spec.noise_sigma,
                static_cast<unsigned long long>(spec.seed));
  set.name = name;

  Scene scene;
  scene.set = std::move(set);
  if (multi) {
    scene.gt.kind = GroundTruth::Kind::Labels;
    scene.gt.labels.resize(scene.set.size());
    for (std::size_t i = 0; i < scene.set.size(); ++i) {
      scene.gt.labels[i] = *scene.set.items[i].gt_label;
    }
  } else {
    scene.gt.kind = GroundTruth::Kind::Homography;
    scene.gt.h = structures.front().h;
  }
  return scene;
}

}  // namespace corrsel

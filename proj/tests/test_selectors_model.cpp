#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "corrsel/geometry.hpp"
#include "corrsel/selectors.hpp"
#include "corrsel/synthgen.hpp"
#include "corrsel/types.hpp"

using namespace corrsel;

namespace {

Scene exact_translation_scene(int n, double ratio, std::uint64_t seed) {
  SceneSpec spec;
  spec.n = n;
  spec.inlier_ratio = ratio;
  spec.noise_sigma = 0.0;
  spec.transform = Translation{40.0, 25.0};
  spec.seed = seed;
  return generate_scene(spec);
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

double recall_against_labels(const CorrespondenceSet& set,
                             const std::vector<std::size_t>& selected) {
  std::size_t hit = 0, total = 0;
  std::vector<bool> in(set.size(), false);
  for (const std::size_t i : selected) in[i] = true;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.items[i].gt_label.value()) {
      ++total;
      if (in[i]) ++hit;
    }
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

double model_frobenius_gap(const ProjectiveModel& got, const Homography& want) {
  const Homography* h = std::get_if<Homography>(&got);
  REQUIRE(h != nullptr);
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += (h->m[i] - want.m[i]) * (h->m[i] - want.m[i]);
  return std::sqrt(s);
}

// Horizontal-parallax stereo pair: disparity varies per point so the cloud is
// not planar and the epipolar geometry is uniquely recoverable.
CorrespondenceSet stereo_set(std::size_t n_in, std::size_t n_out) {
  CorrespondenceSet set;
  set.name = "stereo";
  set.image1 = {800.0, 600.0};
  set.image2 = {800.0, 600.0};
  for (std::size_t i = 0; i < n_in; ++i) {
    const double x = 120.0 + 23.0 * static_cast<double>(i % 25);
    const double y = 80.0 + 31.0 * static_cast<double>((i * 7) % 15);
    const double d = 20.0 + 3.0 * static_cast<double>(i % 13) +
                     0.7 * static_cast<double>((i * i) % 7);
    Correspondence c;
    c.p = {x, y};
    c.q = {x - d, y};
    set.items.push_back(c);
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    Correspondence c;
    c.p = {90.0 + 41.0 * static_cast<double>(i), 70.0 + 29.0 * static_cast<double>(i)};
    c.q = {c.p.x - 40.0, c.p.y + 35.0 + 4.0 * static_cast<double>(i)};
    set.items.push_back(c);
  }
  return set;
}

}  // namespace

// -------------------------------------------------------------------- ransac

TEST_CASE("ransac: clean 80/20 scene is resolved exactly") {
  const Scene scene = exact_translation_scene(100, 0.8, 7);
  const SelectionResult r = select_ransac(scene.set, {}, 7);
  CHECK(r.selected == iota_indices(80));
  REQUIRE(r.model.has_value());
  CHECK(model_frobenius_gap(*r.model, scene.gt.h.value()) < 1e-9);
}

TEST_CASE("ransac: all-inlier scene keeps everything and nails the model") {
  const Scene scene = exact_translation_scene(50, 1.0, 3);
  const SelectionResult r = select_ransac(scene.set, {}, 3);
  CHECK(r.selected == iota_indices(50));
  REQUIRE(r.model.has_value());
  CHECK(model_frobenius_gap(*r.model, scene.gt.h.value()) < 1e-9);
}

TEST_CASE("ransac: selected residuals respect the returned model") {
  SceneSpec spec;
  spec.n = 300;
  spec.inlier_ratio = 0.6;
  spec.noise_sigma = 2.0;
  spec.transform = RandomPerspective{};
  spec.seed = 21;
  const Scene scene = generate_scene(spec);
  RansacParams params;
  params.t_ransac = 6.0;
  const SelectionResult r = select_ransac(scene.set, params, 5);
  REQUIRE(r.model.has_value());
  REQUIRE(!r.selected.empty());
  for (const std::size_t i : r.selected) {
    const double res =
        model_residual(*r.model, scene.set.items[i]);
    CHECK(res <= params.t_ransac + 1e-9);
  }
}

TEST_CASE("ransac: identical seeds reproduce the run") {
  SceneSpec spec;
  spec.n = 200;
  spec.inlier_ratio = 0.5;
  spec.noise_sigma = 1.5;
  spec.seed = 11;
  const Scene scene = generate_scene(spec);
  const SelectionResult a = select_ransac(scene.set, {}, 42);
  const SelectionResult b = select_ransac(scene.set, {}, 42);
  CHECK(a.selected == b.selected);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.confidence == b.confidence);
}

TEST_CASE("ransac: epipolar mode separates parallax inliers from drifters") {
  const CorrespondenceSet set = stereo_set(30, 10);
  RansacParams params;
  params.model_kind = ModelKind::Fundamental;
  params.t_ransac = 1.5;
  const SelectionResult r = select_ransac(set, params, 9);
  CHECK(r.selected == iota_indices(30));
  REQUIRE(r.model.has_value());
  CHECK(std::holds_alternative<Fundamental>(*r.model));
}

TEST_CASE("ransac: minimal-sample guard rails") {
  CorrespondenceSet three;
  three.image1 = three.image2 = {100.0, 100.0};
  for (int i = 0; i < 3; ++i) {
    Correspondence c;
    c.p = {static_cast<double>(i), 0.0};
    c.q = {static_cast<double>(i), 0.0};
    three.items.push_back(c);
  }
  CHECK_THROWS_AS(select_ransac(three, {}, 0), Error);

  // ten collinear points: every homography sample is degenerate
  CorrespondenceSet line;
  line.image1 = line.image2 = {800.0, 600.0};
  for (int i = 0; i < 10; ++i) {
    Correspondence c;
    c.p = {static_cast<double>(i) * 50.0, 100.0};
    c.q = {static_cast<double>(i) * 50.0, 100.0};
    line.items.push_back(c);
  }
  CHECK_THROWS_AS(select_ransac(line, {}, 0), Error);
}

// ---------------------------------------------------------------------- usac

TEST_CASE("usac: quality ordering shortens the clean 80/20 run") {
  const Scene scene = exact_translation_scene(100, 0.8, 7);
  const SelectionResult plain = select_ransac(scene.set, {}, 7);
  const SelectionResult fast = select_usac(scene.set, {}, 7);
  CHECK(fast.selected == iota_indices(80));
  CHECK(fast.iterations_used <= plain.iterations_used);
}

TEST_CASE("usac: low-ratio scene resolved inside the budget") {
  SceneSpec spec;
  spec.n = 1000;
  spec.inlier_ratio = 0.2;
  spec.noise_sigma = 1.0;
  spec.transform = Translation{40.0, 25.0};
  spec.seed = 19;
  const Scene scene = generate_scene(spec);
  const SelectionResult r = select_usac(scene.set, {}, 19);
  CHECK(recall_against_labels(scene.set, r.selected) >= 0.9);
  CHECK(r.iterations_used <= 100000);
}

TEST_CASE("usac: missing qualities fall back to input order with a flag") {
  Scene scene = exact_translation_scene(120, 0.6, 13);
  for (auto& c : scene.set.items) c.quality.reset();
  const SelectionResult r = select_usac(scene.set, {}, 13);
  CHECK(std::find(r.flags.begin(), r.flags.end(), "no-quality-order") != r.flags.end());
  CHECK(recall_against_labels(scene.set, r.selected) >= 0.95);
}

TEST_CASE("usac: epipolar mode with its own gate") {
  const CorrespondenceSet set = stereo_set(40, 12);
  UsacParams params;
  params.model_kind = ModelKind::Fundamental;
  const SelectionResult r = select_usac(set, params, 3);
  CHECK(r.selected == iota_indices(40));
}

TEST_CASE("usac: deterministic under a fixed seed") {
  SceneSpec spec;
  spec.n = 400;
  spec.inlier_ratio = 0.4;
  spec.noise_sigma = 1.0;
  spec.seed = 29;
  const Scene scene = generate_scene(spec);
  const SelectionResult a = select_usac(scene.set, {}, 1);
  const SelectionResult b = select_usac(scene.set, {}, 1);
  CHECK(a.selected == b.selected);
  CHECK(a.iterations_used == b.iterations_used);
}

// ----------------------------------------------------------------------- vfc

TEST_CASE("vfc_posterior: hand values and the certain-inlier limit") {
  CHECK(vfc_posterior(123.4, 1.0, 2.0, 10.0) == doctest::Approx(1.0));
  const double num = 0.5 * std::exp(-1.0 / 4.0);
  const double den = num + 0.5 * 2.0 * 3.14159265358979323846 * 2.0 / 10.0;
  CHECK(vfc_posterior(1.0, 0.5, 2.0, 10.0) == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(vfc_posterior(0.0, 0.0, 2.0, 10.0) == doctest::Approx(0.0));
}

TEST_CASE("vfc: mixing weight tracks the true inlier fraction") {
  SceneSpec spec;
  spec.n = 500;
  spec.inlier_ratio = 0.7;
  spec.noise_sigma = 1.0;
  spec.transform = Translation{30.0, -20.0};
  spec.seed = 23;
  const Scene scene = generate_scene(spec);
  const VfcFit fit = vfc_fit(scene.set, {});
  CHECK(fit.gamma == doctest::Approx(0.7).epsilon(0.15));
  CHECK(fit.converged);

  // every generator inlier sits above the acceptance threshold
  VfcParams params;
  const SelectionResult r = select_vfc(scene.set, params);
  std::vector<bool> in(scene.set.size(), false);
  for (const std::size_t i : r.selected) in[i] = true;
  std::size_t missed = 0;
  for (std::size_t i = 0; i < scene.set.size(); ++i) {
    if (scene.set.items[i].gt_label.value() && !in[i]) ++missed;
  }
  CHECK(missed == 0);
  for (std::size_t i = 0; i < fit.posterior.size(); ++i) {
    CHECK(fit.posterior[i] >= 0.0);
    CHECK(fit.posterior[i] <= 1.0);
  }
}

TEST_CASE("vfc: noiseless smooth motion saturates the posterior") {
  const Scene scene = exact_translation_scene(200, 1.0, 31);
  const VfcFit fit = vfc_fit(scene.set, {});
  CHECK(fit.gamma > 0.98);
  const SelectionResult r = select_vfc(scene.set, {});
  CHECK(r.selected.size() == scene.set.size());
}

TEST_CASE("vfc: iteration starvation is flagged") {
  SceneSpec spec;
  spec.n = 300;
  spec.inlier_ratio = 0.6;
  spec.noise_sigma = 2.0;
  spec.seed = 37;
  const Scene scene = generate_scene(spec);
  VfcParams params;
  params.max_em_iters = 1;
  const SelectionResult r = select_vfc(scene.set, params);
  CHECK(std::find(r.flags.begin(), r.flags.end(), "unconverged") != r.flags.end());
}

TEST_CASE("vfc: reduced-basis path still resolves a large smooth scene") {
  SceneSpec spec;
  spec.n = 900;  // above the exact-solve cutoff
  spec.inlier_ratio = 0.7;
  spec.noise_sigma = 1.0;
  spec.transform = Translation{25.0, 15.0};
  spec.seed = 41;
  const Scene scene = generate_scene(spec);
  const SelectionResult r = select_vfc(scene.set, {});
  CHECK(recall_against_labels(scene.set, r.selected) >= 0.9);
}

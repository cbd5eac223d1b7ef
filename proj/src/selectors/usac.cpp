#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "corrsel/geometry.hpp"
#include "corrsel/rng.hpp"
#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

namespace {

// Wald-style rejection threshold for the sequential model check, balancing
// verification cost against the risk of discarding a good model. Fixed-point
// iteration on A = K + log A.
double sprt_threshold(double eps, double delta) {
  constexpr double kVerifyCostRatio = 200.0;  // model fits per residual check
  constexpr double kModelsPerSample = 1.0;
  const double c = (1.0 - delta) * std::log((1.0 - delta) / (1.0 - eps)) +
                   delta * std::log(delta / eps);
  const double k = kVerifyCostRatio * c / kModelsPerSample + 1.0;
  double a = std::max(k, 1.5);
  for (int i = 0; i < 12; ++i) a = k + std::log(a);
  return std::max(a, 1.5);
}

double hypothesis_budget(double confidence, double w, int sample_size) {
  const double p_good = std::pow(std::clamp(w, 0.0, 0.999999), sample_size);
  if (p_good <= 0.0) return 1e18;
  const double denom = std::log1p(-p_good);
  if (denom >= 0.0) return 1.0;
  return std::log1p(-confidence) / denom;
}

struct SprtOutcome {
  bool accepted = false;
  std::size_t inliers = 0;    // valid only when accepted
  std::size_t checked = 0;    // residuals evaluated before the decision
  std::size_t consistent = 0; // inlier-consistent among the checked
};

SprtOutcome sprt_evaluate(const CorrespondenceSet& set, const ProjectiveModel& model,
                          double threshold, double eps, double delta, double reject_at) {
  SprtOutcome out;
  const double on_inlier = delta / eps;
  const double on_outlier = (1.0 - delta) / (1.0 - eps);
  double ratio = 1.0;
  for (const auto& c : set.items) {
    ++out.checked;
    const bool inlier = detail::guarded_residual(model, c) <= threshold;
    if (inlier) {
      ++out.consistent;
      ratio *= on_inlier;
    } else {
      ratio *= on_outlier;
    }
    if (ratio > reject_at) return out;
  }
  out.accepted = true;
  out.inliers = out.consistent;
  return out;
}

}  // namespace

SelectionResult select_usac(const CorrespondenceSet& set, const UsacParams& params,
                            std::uint64_t seed) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  const bool fundamental = params.model_kind == ModelKind::Fundamental;
  const std::size_t sample_size = fundamental ? 8 : 4;
  const double threshold = fundamental ? params.t_f : params.t_h;
  if (n < sample_size) {
    throw Error(ErrorKind::TooFewMatches, "fewer correspondences than the minimal sample");
  }

  // Progressive pool over quality-sorted matches; without qualities the input
  // order stands in for the ranking.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const bool have_quality =
      std::all_of(set.items.begin(), set.items.end(), [](const auto& c) { return bool(c.quality); });
  if (have_quality) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return *set.items[a].quality < *set.items[b].quality;
    });
  } else {
    result.flags.emplace_back("no-quality-order");
  }
  const int growth_interval =
      std::max(1, (params.n_usac + static_cast<int>(n) - 1) / static_cast<int>(n));

  Rng rng(seed);
  std::array<std::size_t, 8> pick{};
  std::array<Correspondence, 8> sample{};

  double eps = params.sprt_eps0;
  double delta = params.sprt_delta0;
  double reject_at = sprt_threshold(eps, delta);
  std::size_t rejected_checked = 0;
  std::size_t rejected_consistent = 0;

  std::optional<ProjectiveModel> best;
  std::size_t best_count = 0;
  std::vector<char> best_mask(n, 0);
  bool any_fit = false;
  int hypotheses = 0;
  double budget = static_cast<double>(params.n_usac);

  const auto count_inliers = [&](const ProjectiveModel& model, std::vector<char>& mask) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in = detail::guarded_residual(model, set.items[i]) <= threshold;
      mask[i] = in ? 1 : 0;
      count += in ? 1 : 0;
    }
    return count;
  };

  // Needs at least one more point than the minimal sample to be worth a draw.
  const std::size_t pool_start = sample_size + 1;

  while (hypotheses < params.n_usac && static_cast<double>(hypotheses) < budget) {
    const std::size_t pool =
        std::min(n, pool_start + static_cast<std::size_t>(hypotheses / growth_interval));
    ++hypotheses;

    detail::sample_distinct(rng, pool, sample_size, pick.data());
    for (std::size_t i = 0; i < sample_size; ++i) sample[i] = set.items[order[pick[i]]];

    ProjectiveModel model;
    try {
      model = detail::fit_model({sample.data(), sample_size}, params.model_kind);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateSample) continue;
      throw;
    }
    any_fit = true;

    const SprtOutcome outcome =
        sprt_evaluate(set, model, threshold, eps, delta, reject_at);
    if (!outcome.accepted) {
      rejected_checked += outcome.checked;
      rejected_consistent += outcome.consistent;
      // Track the background consistency rate; refresh the test when the
      // estimate drifts.
      if (rejected_checked >= 32) {
        const double observed = static_cast<double>(rejected_consistent) /
                                static_cast<double>(rejected_checked);
        const double bounded = std::clamp(observed, 1e-4, 0.95 * eps);
        if (std::fabs(bounded - delta) > 0.05 * delta) {
          delta = bounded;
          reject_at = sprt_threshold(eps, delta);
        }
      }
      continue;
    }

    // Planar point configurations explain an epipolar fit without
    // constraining it; drop hypotheses whose sample is mostly one plane.
    if (fundamental) {
      static constexpr std::array<std::array<std::size_t, 4>, 3> kQuads{
          {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 2, 4, 6}}};
      bool degenerate = false;
      std::array<Correspondence, 4> quad{};
      for (const auto& ids : kQuads) {
        for (std::size_t i = 0; i < 4; ++i) quad[i] = sample[ids[i]];
        Homography h;
        try {
          h = estimate_homography({quad.data(), 4});
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::DegenerateSample) continue;
          throw;
        }
        std::size_t on_plane = 0;
        for (std::size_t i = 0; i < sample_size; ++i) {
          try {
            if (homography_residual(h, sample[i]) <= params.t_h) ++on_plane;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::PointAtInfinity) throw;
          }
        }
        if (on_plane >= 5) {
          degenerate = true;
          break;
        }
      }
      if (degenerate) continue;
    }

    if (outcome.inliers <= best_count) continue;

    // Local optimization: refit on the full inlier set until the count stops
    // growing.
    std::vector<char> mask(n, 0);
    std::size_t count = count_inliers(model, mask);
    ProjectiveModel refined = model;
    for (int round = 0; round < params.lo_inner_rounds; ++round) {
      std::vector<Correspondence> support;
      support.reserve(count);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) support.push_back(set.items[i]);
      }
      if (support.size() < sample_size) break;
      ProjectiveModel candidate;
      try {
        candidate = detail::fit_model(support, params.model_kind);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateSample) break;
        throw;
      }
      std::vector<char> candidate_mask(n, 0);
      const std::size_t candidate_count = count_inliers(candidate, candidate_mask);
      if (candidate_count <= count) break;
      count = candidate_count;
      mask = std::move(candidate_mask);
      refined = candidate;
    }

    if (count > best_count) {
      best_count = count;
      best = refined;
      best_mask = mask;

      // Confidence bound against the current pool: the sorted prefix usually
      // holds a far higher inlier rate than the whole set, which is what lets
      // the progressive search stop early.
      std::size_t pool_inliers = 0;
      for (std::size_t i = 0; i < pool; ++i) {
        if (best_mask[order[i]]) ++pool_inliers;
      }
      const double w_pool = static_cast<double>(pool_inliers) / static_cast<double>(pool);
      const double w_all = static_cast<double>(best_count) / static_cast<double>(n);
      const double w = std::max(w_all, w_pool);
      budget = std::min(budget, static_cast<double>(hypotheses) +
                                    hypothesis_budget(params.confidence, w,
                                                      static_cast<int>(sample_size)));

      const double eps_new = std::max(eps, w_all);
      if (eps_new > eps * 1.05) {
        eps = eps_new;
        delta = std::min(delta, 0.95 * eps);
        reject_at = sprt_threshold(eps, delta);
      }
    }
  }
  result.iterations_used = hypotheses;

  if (!best) {
    if (!any_fit) {
      throw Error(ErrorKind::NoModel, "every minimal sample was degenerate");
    }
    // Every fitted hypothesis failed verification; an empty answer is the
    // honest one.
    result.flags.emplace_back("no-accepted-model");
    return result;
  }

  std::vector<double> confidence(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = detail::guarded_residual(*best, set.items[i]);
    confidence[i] = std::max(0.0, threshold - r);
    if (r <= threshold) result.selected.push_back(i);
  }
  result.confidence = std::move(confidence);
  result.model = best;
  return result;
}

}  // namespace corrsel

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "corrsel/geometry.hpp"
#include "corrsel/rng.hpp"
#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

namespace {

// Number of hypotheses needed to hit the confidence target at inlier rate w.
double adaptive_budget(double confidence, double w, int sample_size) {
  const double w_clamped = std::clamp(w, 0.0, 0.999999);
  const double p_good = std::pow(w_clamped, sample_size);
  if (p_good <= 0.0) return 1e18;
  const double denom = std::log1p(-p_good);
  if (denom >= 0.0) return 1.0;
  return std::log1p(-confidence) / denom;
}

}  // namespace

SelectionResult select_ransac(const CorrespondenceSet& set, const RansacParams& params,
                              std::uint64_t seed) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  const std::size_t sample_size = params.model_kind == ModelKind::Homography ? 4 : 8;
  if (n < sample_size) {
    throw Error(ErrorKind::TooFewMatches, "fewer correspondences than the minimal sample");
  }

  Rng rng(seed);
  std::array<std::size_t, 8> idx{};
  std::array<Correspondence, 8> sample{};

  std::optional<ProjectiveModel> best;
  std::size_t best_count = 0;
  bool any_fit = false;
  int hypotheses = 0;
  double budget = static_cast<double>(params.n_ransac);

  while (hypotheses < params.n_ransac && static_cast<double>(hypotheses) < budget) {
    ++hypotheses;
    detail::sample_distinct(rng, n, sample_size, idx.data());
    for (std::size_t i = 0; i < sample_size; ++i) sample[i] = set.items[idx[i]];

    ProjectiveModel model;
    try {
      model = detail::fit_model({sample.data(), sample_size}, params.model_kind);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateSample) continue;
      throw;
    }
    any_fit = true;

    std::size_t count = 0;
    for (const auto& c : set.items) {
      if (detail::guarded_residual(model, c) <= params.t_ransac) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = model;
      budget = std::min(budget,
                        adaptive_budget(params.confidence,
                                        static_cast<double>(count) / static_cast<double>(n),
                                        static_cast<int>(sample_size)));
    }
  }
  result.iterations_used = hypotheses;

  if (!best) {
    if (!any_fit) {
      throw Error(ErrorKind::NoModel, "every minimal sample was degenerate");
    }
    result.flags.emplace_back("no-model");
    return result;
  }

  std::vector<double> confidence(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = detail::guarded_residual(*best, set.items[i]);
    confidence[i] = std::max(0.0, params.t_ransac - r);
    if (r <= params.t_ransac) result.selected.push_back(i);
  }
  result.confidence = std::move(confidence);
  result.model = best;
  return result;
}

}  // namespace corrsel

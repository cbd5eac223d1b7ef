#include "corrsel/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "corrsel/geometry.hpp"

namespace corrsel {

namespace {

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

EvalRow scored_row(double tau, std::size_t n_selected, std::size_t n_correct, std::size_t n_gt) {
  EvalRow row;
  row.tau = tau;
  row.n_selected = n_selected;
  row.n_correct = n_correct;
  row.n_gt = n_gt;
  row.precision = safe_ratio(n_correct, n_selected);
  row.recall = safe_ratio(n_correct, n_gt);
  const double pr = row.precision + row.recall;
  row.f_measure = pr > 0.0 ? 2.0 * row.precision * row.recall / pr : 0.0;
  return row;
}

}  // namespace

EvaluationReport evaluate(const CorrespondenceSet& set, const SelectionResult& result,
                          const GroundTruth& gt, const EvalOptions& opts,
                          const std::string& method) {
  for (const std::size_t idx : result.selected) {
    if (idx >= set.size()) {
      throw Error(ErrorKind::InvalidInput, "selected index out of range");
    }
  }

  EvaluationReport report;
  report.method = method;
  report.runtime = result.runtime;
  report.flags = result.flags;
  if (result.selected.empty()) {
    report.flags.push_back("empty-selection");
  }

  if (gt.kind == GroundTruth::Kind::Labels) {
    if (gt.labels.size() != set.size()) {
      throw Error(ErrorKind::MissingGroundTruth, "label count does not match the set");
    }
    const auto n_gt =
        static_cast<std::size_t>(std::count(gt.labels.begin(), gt.labels.end(), true));
    std::size_t n_correct = 0;
    for (const std::size_t idx : result.selected) {
      if (gt.labels[idx]) ++n_correct;
    }
    report.rows.push_back(scored_row(0.0, result.selected.size(), n_correct, n_gt));
    return report;
  }

  if (!gt.h) {
    throw Error(ErrorKind::MissingGroundTruth, "homography truth without a homography");
  }
  if (!(opts.t_gt > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "t_gt must be positive");
  }

  std::vector<double> taus;
  taus.reserve(opts.taus.size());
  for (const double tau : opts.taus) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidInput, "tau must be nonnegative");
    taus.push_back(std::min(tau, opts.t_gt));
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<double> residuals(set.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < set.size(); ++i) {
    try {
      residuals[i] = homography_residual(*gt.h, set.items[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PointAtInfinity) throw;
    }
  }

  // The ground-truth inlier set is gated by t_gt alone; the tau sweep only
  // moves the correctness bar, so recall is non-decreasing in tau.
  std::size_t n_gt = 0;
  for (const double r : residuals) {
    if (r <= opts.t_gt) ++n_gt;
  }

  for (const double tau : taus) {
    std::size_t n_correct = 0;
    for (const std::size_t idx : result.selected) {
      if (residuals[idx] <= tau) ++n_correct;
    }
    report.rows.push_back(scored_row(tau, result.selected.size(), n_correct, n_gt));
  }
  return report;
}

std::vector<BenchRow> bench(const std::vector<MethodSpec>& methods, const BenchOptions& opts) {
  if (opts.repeats < 1) throw Error(ErrorKind::InvalidInput, "repeats must be at least 1");
  if (opts.sizes.empty()) throw Error(ErrorKind::InvalidInput, "no sizes to benchmark");
  for (const int n : opts.sizes) {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "sizes must be positive");
  }

  std::vector<int> sizes = opts.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  // One scene per (size, rep), shared verbatim across every method.
  struct Cell {
    CorrespondenceSet set;
    std::uint64_t seed = 0;
  };
  std::vector<std::vector<Cell>> cells(sizes.size());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    cells[si].reserve(static_cast<std::size_t>(opts.repeats));
    for (int rep = 0; rep < opts.repeats; ++rep) {
      const std::uint64_t stream =
          static_cast<std::uint64_t>(sizes[si]) * 1000003ull + static_cast<std::uint64_t>(rep);
      SceneSpec spec = opts.scene_template;
      spec.n = sizes[si];
      spec.seed = Rng::derive(opts.seed, stream);
      cells[si].push_back({generate_scene(spec).set, spec.seed});
    }
  }

  std::vector<BenchRow> rows;
  rows.reserve(methods.size() * sizes.size());
  for (const MethodSpec& method : methods) {
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      BenchRow row;
      row.method = method.name;
      row.n = sizes[si];
      std::vector<double> times_ms;
      times_ms.reserve(cells[si].size());
      for (const Cell& cell : cells[si]) {
        try {
          const auto start = std::chrono::steady_clock::now();
          (void)run_method(method, cell.set, cell.seed);
          const auto stop = std::chrono::steady_clock::now();
          times_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        } catch (const Error&) {
          ++row.failures;
        }
      }
      row.completed = static_cast<int>(times_ms.size());
      if (!times_ms.empty()) {
        double sum = 0.0;
        for (const double t : times_ms) sum += t;
        row.mean_ms = sum / static_cast<double>(times_ms.size());
        double var = 0.0;
        for (const double t : times_ms) var += (t - row.mean_ms) * (t - row.mean_ms);
        row.stddev_ms = std::sqrt(var / static_cast<double>(times_ms.size()));
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace corrsel

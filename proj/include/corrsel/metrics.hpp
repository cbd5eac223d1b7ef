#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "corrsel/dispatch.hpp"
#include "corrsel/synthgen.hpp"
#include "corrsel/types.hpp"

namespace corrsel {

struct EvalOptions {
  double t_gt = 10.0;                                    // ground-truth residual gate, pixels
  std::vector<double> taus = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};  // correctness sweep
};

struct EvalRow {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t n_selected = 0;
  std::size_t n_correct = 0;
  std::size_t n_gt = 0;
};

struct EvaluationReport {
  std::string method;
  std::vector<EvalRow> rows;
  std::chrono::nanoseconds runtime{0};
  std::vector<std::string> flags;
};

// Scores a selection against ground truth. Homography truth produces one row
// per tau (capped at t_gt, ascending, deduplicated) with correctness meaning
// reprojection error at most tau; the reference inlier set is fixed by t_gt
// across the whole sweep. Label truth ignores the sweep and emits a single
// row with tau recorded as 0. An empty selection scores zero across
// the board and is flagged. P = R = F = 0 conventions apply whenever a
// denominator is empty.
EvaluationReport evaluate(const CorrespondenceSet& set, const SelectionResult& result,
                          const GroundTruth& gt, const EvalOptions& opts = {},
                          const std::string& method = "");

struct BenchRow {
  std::string method;
  int n = 0;
  double mean_ms = 0.0;    // over completed reps; meaningless when completed == 0
  double stddev_ms = 0.0;  // population formula
  int failures = 0;
  int completed = 0;
};

struct BenchOptions {
  std::vector<int> sizes;
  int repeats = 10;
  SceneSpec scene_template;  // n and seed are overridden per cell
  std::uint64_t seed = 1;
};

// Sequential timing grid. Scene seeds derive from (seed, size, rep) only, so
// every method faces identical inputs; the clock covers the selector call
// alone. A rep whose selector throws counts as a failure and contributes no
// time. Rows are ordered by method then ascending size.
std::vector<BenchRow> bench(const std::vector<MethodSpec>& methods, const BenchOptions& opts);

}  // namespace corrsel

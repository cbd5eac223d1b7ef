#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrsel/dispatch.hpp"
#include "corrsel/metrics.hpp"
#include "corrsel/synthgen.hpp"
#include "corrsel/types.hpp"

namespace corrsel {

// Scene text layout: one object per correspondence (`x`, `xp`, optional
// `quality`, `affine`, `label`), image sizes as [w, h], ground truth either
// {"type": "homography", "H": [9 row-major reals]} or {"type": "labels"} with
// the labels living on the correspondences. Numbers print in the shortest
// form that parses back to the identical double, so write(parse(write(s)))
// is byte-identical to write(s).
std::string scene_to_json(const Scene& scene);

// Strict parser: unknown fields, missing required fields, and out-of-range
// values all throw InvalidInput; a labels ground truth without a label on
// every correspondence throws MissingGroundTruth.
Scene scene_from_json(const std::string& text);

// A result file names the method and its full effective parameter set, so
// downstream scoring is reproducible from files alone.
struct StoredResult {
  MethodSpec spec;
  std::uint64_t seed = 0;
  SelectionResult result;
};

std::string result_to_json(const MethodSpec& spec, std::uint64_t seed,
                           const SelectionResult& result);
StoredResult result_from_json(const std::string& text);

// CSV schemas. Evaluation: one row per report row under the header
// `method,tau,precision,recall,f_measure,n_selected,n_correct,n_gt,runtime_ms,flags`
// with flags joined by ';'. Bench: `method,n,mean_ms,stddev_ms,failures`;
// a cell with zero completed reps leaves the mean and stddev fields empty.
std::string eval_csv(const std::vector<EvaluationReport>& reports);
std::string bench_csv(const std::vector<BenchRow>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace corrsel

#pragma once

#include <chrono>
#include <limits>
#include <span>

#include "corrsel/geometry.hpp"
#include "corrsel/rng.hpp"
#include "corrsel/selectors.hpp"
#include "corrsel/types.hpp"

namespace corrsel::detail {

// Stamps wall time of the enclosing scope into a result.
class ScopeTimer {
 public:
  explicit ScopeTimer(SelectionResult& result)
      : result_(result), start_(std::chrono::steady_clock::now()) {}

  ~ScopeTimer() {
    result_.runtime = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start_);
  }

 private:
  SelectionResult& result_;
  std::chrono::steady_clock::time_point start_;
};

// Draws count distinct indices from [0, pool). Rejection sampling; count is
// tiny against the pool so retries are rare and the draw order stays stable.
inline void sample_distinct(Rng& rng, std::size_t pool, std::size_t count, std::size_t* out) {
  std::size_t filled = 0;
  while (filled < count) {
    const auto candidate = static_cast<std::size_t>(rng.uniform_int(pool));
    bool duplicate = false;
    for (std::size_t i = 0; i < filled; ++i) {
      if (out[i] == candidate) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out[filled++] = candidate;
  }
}

inline ProjectiveModel fit_model(std::span<const Correspondence> pts, ModelKind kind) {
  if (kind == ModelKind::Homography) return estimate_homography(pts);
  return estimate_fundamental(pts);
}

// Residual that treats a point pushed to infinity as maximally inconsistent
// instead of failing the whole run.
inline double guarded_residual(const ProjectiveModel& model, const Correspondence& c) {
  try {
    return model_residual(model, c);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PointAtInfinity) {
      return std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

}  // namespace corrsel::detail

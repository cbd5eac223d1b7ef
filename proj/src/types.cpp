#include "corrsel/types.hpp"

#include <cmath>
#include <limits>

namespace corrsel {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::NoSeparation: return "NoSeparation";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::MissingQuality: return "MissingQuality";
    case ErrorKind::MissingAffine: return "MissingAffine";
    case ErrorKind::TooFewMatches: return "TooFewMatches";
    case ErrorKind::NoModel: return "NoModel";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
  }
  return "Unknown";
}

std::array<double, 9> canonicalize_model(const std::array<double, 9>& m) {
  double sq = 0.0;
  for (double v : m) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw Error(ErrorKind::DegenerateModel, "model has no canonical scale");
  }
  const double norm = std::sqrt(sq);

  std::array<double, 9> out = m;
  // Inputs already at unit norm pass through untouched, which makes
  // canonicalization exactly idempotent.
  if (std::fabs(norm - 1.0) > 16.0 * std::numeric_limits<double>::epsilon()) {
    for (double& v : out) v /= norm;
  }

  int last_nonzero = -1;
  for (int i = 8; i >= 0; --i) {
    if (out[static_cast<std::size_t>(i)] != 0.0) {
      last_nonzero = i;
      break;
    }
  }
  if (last_nonzero >= 0 && out[static_cast<std::size_t>(last_nonzero)] < 0.0) {
    for (double& v : out) v = -v;
  }
  for (double& v : out) {
    if (v == 0.0) v = 0.0;  // collapse -0.0 so serialized forms stay stable
  }
  return out;
}

}  // namespace corrsel

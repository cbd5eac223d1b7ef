#include <algorithm>
#include <vector>

#include "corrsel/geometry.hpp"
#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

SelectionResult select_nnsr(const CorrespondenceSet& set, const NnsrParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  if (n == 0) return result;

  std::vector<double> quality(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!set.items[i].quality) {
      throw Error(ErrorKind::MissingQuality, "correspondence lacks a quality value");
    }
    quality[i] = *set.items[i].quality;
  }

  double threshold;
  if (params.t_nnsr) {
    threshold = *params.t_nnsr;
  } else {
    try {
      threshold = otsu_threshold(quality);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSeparation) throw;
      // Indistinguishable qualities carry no ranking signal; keep everything.
      result.flags.emplace_back("no-separation");
      for (std::size_t i = 0; i < n; ++i) result.selected.push_back(i);
      result.confidence = std::vector<double>(n, 0.0);
      return result;
    }
  }

  std::vector<double> confidence(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    confidence[i] = std::max(0.0, threshold - quality[i]);
    if (quality[i] <= threshold) result.selected.push_back(i);
  }
  result.confidence = std::move(confidence);
  return result;
}

}  // namespace corrsel

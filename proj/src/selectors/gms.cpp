#include <algorithm>
#include <cmath>
#include <vector>

#include "corrsel/selectors.hpp"
#include "selectors/common.hpp"

namespace corrsel {

GmsStatModel gms_distribution(double delta, double zeta, int m, int big_m, int k_cells,
                              int n_per_cell) {
  if (big_m == 0) {
    throw Error(ErrorKind::InvalidInput, "zero total feature count");
  }
  if (delta < 0.0 || delta > 1.0 || m > big_m || m < 0 || k_cells < 1 || n_per_cell < 1) {
    throw Error(ErrorKind::InvalidInput, "distribution parameters out of range");
  }
  const double frac = static_cast<double>(m) / static_cast<double>(big_m);
  GmsStatModel out;
  // Support hit rates around a correct and an incorrect cell pair.
  out.p_true = delta + (1.0 - delta) * zeta * frac;
  out.p_false = zeta * (1.0 - delta) * frac;

  const double kn = static_cast<double>(k_cells) * static_cast<double>(n_per_cell);
  out.mean_true = kn * out.p_true;
  out.mean_false = kn * out.p_false;
  out.sd_true = std::sqrt(kn * out.p_true * (1.0 - out.p_true));
  out.sd_false = std::sqrt(kn * out.p_false * (1.0 - out.p_false));

  const double spread = out.sd_true + out.sd_false;
  out.score = spread > 0.0 ? (out.mean_true - out.mean_false) / spread : 0.0;
  return out;
}

SelectionResult select_gms(const CorrespondenceSet& set, const GmsParams& params) {
  SelectionResult result;
  detail::ScopeTimer timer(result);

  const std::size_t n = set.size();
  if (n == 0) return result;
  if (params.grid < 2 || set.image1.width <= 0.0 || set.image1.height <= 0.0 ||
      set.image2.width <= 0.0 || set.image2.height <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "grid needs at least 2 cells and positive image sizes");
  }

  const int g = params.grid;
  const auto cells = static_cast<std::size_t>(g) * static_cast<std::size_t>(g);

  const auto cell_of = [g](Point2 p, const ImageSize& size) {
    int cx = static_cast<int>(p.x / size.width * g);
    int cy = static_cast<int>(p.y / size.height * g);
    cx = std::clamp(cx, 0, g - 1);
    cy = std::clamp(cy, 0, g - 1);
    return std::make_pair(cx, cy);
  };

  // chi[c1][c2]: matches starting in image-1 cell c1 and landing in image-2
  // cell c2. Kept sparse per c1 since each source cell maps to few targets.
  std::vector<int> cell1(n), cell2(n);
  std::vector<int> count1(cells, 0);
  std::vector<std::vector<std::pair<int, int>>> chi(cells);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [ax, ay] = cell_of(set.items[i].p, set.image1);
    const auto [bx, by] = cell_of(set.items[i].q, set.image2);
    cell1[i] = ay * g + ax;
    cell2[i] = by * g + bx;
    ++count1[static_cast<std::size_t>(cell1[i])];
    auto& row = chi[static_cast<std::size_t>(cell1[i])];
    auto it = std::find_if(row.begin(), row.end(),
                           [&](const auto& e) { return e.first == cell2[i]; });
    if (it == row.end()) {
      row.emplace_back(cell2[i], 1);
    } else {
      ++it->second;
    }
  }

  const auto chi_count = [&](int c1, int c2) {
    const auto& row = chi[static_cast<std::size_t>(c1)];
    const auto it = std::find_if(row.begin(), row.end(),
                                 [&](const auto& e) { return e.first == c2; });
    return it == row.end() ? 0 : it->second;
  };

  // Paired cell of each occupied image-1 cell: the image-2 cell holding most
  // of its matches, ties toward the lower cell index.
  std::vector<int> paired(cells, -1);
  for (std::size_t c = 0; c < cells; ++c) {
    int best_count = 0;
    int best_cell = -1;
    for (const auto& [target, cnt] : chi[c]) {
      if (cnt > best_count || (cnt == best_count && target < best_cell)) {
        best_count = cnt;
        best_cell = target;
      }
    }
    paired[c] = best_cell;
  }

  // Accept pair (i, j) when the 3x3 co-moving support beats alpha times
  // sqrt(mean population of the contributing source cells). Border
  // neighborhoods truncate to the offsets valid in both grids.
  std::vector<bool> pair_accepted(cells, false);
  for (std::size_t c = 0; c < cells; ++c) {
    if (paired[c] < 0) continue;
    const int ix = static_cast<int>(c) % g;
    const int iy = static_cast<int>(c) / g;
    const int jx = paired[c] % g;
    const int jy = paired[c] / g;

    double support = 0.0;
    double population = 0.0;
    int available = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int ax = ix + dx, ay = iy + dy;
        const int bx = jx + dx, by = jy + dy;
        if (ax < 0 || ax >= g || ay < 0 || ay >= g) continue;
        if (bx < 0 || bx >= g || by < 0 || by >= g) continue;
        ++available;
        const int c1 = ay * g + ax;
        support += chi_count(c1, by * g + bx);
        population += count1[static_cast<std::size_t>(c1)];
      }
    }
    if (available == 0) continue;
    const double mean_pop = population / available;
    pair_accepted[c] = support > params.alpha * std::sqrt(mean_pop);
  }

  std::vector<double> confidence(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c1 = static_cast<std::size_t>(cell1[i]);
    const bool in_pair = paired[c1] == cell2[i];
    if (in_pair && pair_accepted[c1]) {
      result.selected.push_back(i);
      confidence[i] = 1.0;
    }
  }
  result.confidence = std::move(confidence);
  result.iterations_used = 1;
  return result;
}

}  // namespace corrsel

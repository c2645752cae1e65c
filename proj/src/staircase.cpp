#include "ehdc/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehdc/errors.hpp"

namespace ehdc {

namespace {
constexpr double kTieTol = 1e-12;
}

Staircase solve_staircase(std::span<const BudgetStream> streams) {
  if (streams.empty()) throw StructuralError("staircase needs a stream");
  const std::size_t n = streams.front().cumulative.size();
  for (const auto& s : streams) {
    if (s.cumulative.size() != n) {
      throw StructuralError("stream lengths differ");
    }
  }

  Staircase out;
  out.rates.assign(n, 0.0);
  std::vector<double> spent(streams.size(), 0.0);
  std::vector<std::vector<double>> levels(streams.size(),
                                          std::vector<double>(n));
  std::size_t start = 0;
  while (start < n) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_end = start;
    for (std::size_t i = start; i < n; ++i) {
      const double len = static_cast<double>(i - start + 1);
      double lvl = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < streams.size(); ++j) {
        const double avail =
            std::max(streams[j].cumulative[i] - spent[j], 0.0) / len;
        levels[j][i] = streams[j].level(avail);
        lvl = std::min(lvl, levels[j][i]);
      }
      if (lvl <= best * (1.0 + kTieTol) || lvl <= best + kTieTol * 1e-3) {
        best_end = i;
        best = std::min(best, lvl);
      }
    }
    for (std::size_t i = start; i <= best_end; ++i) out.rates[i] = best;
    const double len = static_cast<double>(best_end - start + 1);
    std::vector<bool> tight(streams.size());
    for (std::size_t j = 0; j < streams.size(); ++j) {
      const double lvl = levels[j][best_end];
      tight[j] = lvl <= best * (1.0 + 1e-9) + 1e-12;
      if (best > 0.0) spent[j] += len * streams[j].cost(best);
    }
    out.tight.push_back(std::move(tight));
    out.segment_ends.push_back(best_end + 1);
    start = best_end + 1;
  }
  return out;
}

}  // namespace ehdc

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ehdc/model.hpp"

namespace ehdc::waterfill {

/// One slot of a water-filling problem. Water poured into the bin raises the
/// level from `floor`; the objective rewards log(floor + water).
struct Bin {
  double floor = 1.0;
  std::optional<double> cap;
  std::optional<double> min_power;
};

/// Bins with the given floors and no caps or minimums.
std::vector<Bin> bins_with_floors(std::span<const double> floors);

/// Maximizes sum_i log(floor_i + x_i) - log(floor_i) subject to
/// sum_{i<=k} x_i <= sum_{i<=k} budget_i and 0 <= x_i <= cap_i. Water only
/// flows forward in time. Water that no later bin can absorb is discarded.
/// Bins must not carry min_power (see min_power_backward_fill).
PowerPolicy directional_waterfill(std::span<const Bin> bins,
                                  const EnergyProfile& budget);

/// Maximizes sum_i log(floor + x_i) with a common floor subject to the
/// cumulative budget and x_i >= min_power_i, for a non-decreasing minimum
/// power vector. Sweeps backward from the last bin: a bin short of its minimum
/// is topped up from earlier bins, otherwise any surplus is spread forward
/// over the bins from the current one to the end.
/// InfeasibleError (naming the first failing prefix) when the minimums exceed
/// the budget.
PowerPolicy min_power_backward_fill(std::span<const Bin> bins,
                                    const EnergyProfile& budget);

namespace detail {
/// Pool-adjacent-violators fill handling floors, caps and minimums together.
/// Used by directional_waterfill and as an independent check of the backward
/// minimum-power sweep.
std::vector<double> pooled_fill(std::span<const Bin> bins,
                                std::span<const double> arrivals);
}  // namespace detail

/// Concave maximization over {x >= 0 : sum_{i<=k} x_i <= sum_{i<=k} B_i}.
struct OuterProblem {
  std::function<double(std::span<const double>)> evaluate;
  EnergyProfile cumulative_budget;
  /// When false the final cumulative constraint holds with equality.
  bool allow_discard = true;
  /// Restrict to non-decreasing allocations.
  bool monotone_allocation_required = false;
};

struct OuterOptions {
  double tol = 1e-8;
  int max_iters = 10'000;
};

struct OuterResult {
  std::vector<double> allocation;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Objective after each sweep, starting with the initial point.
  std::vector<double> value_history;
};

/// Moves water between bins (and to a discard slot) by exact line searches
/// until a full sweep gains less than tol (relative).
OuterResult outer_waterflow(const OuterProblem& problem,
                            const OuterOptions& options = {});

}  // namespace ehdc::waterfill

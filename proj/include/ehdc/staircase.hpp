#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ehdc {

/// One cumulative resource limiting a constant-rate stretch. Spending rate r
/// in a slot consumes cost(r); level(e) is the largest rate whose per-slot
/// cost is e.
struct BudgetStream {
  std::vector<double> cumulative;
  std::function<double(double)> level;
  std::function<double(double)> cost;
};

struct Staircase {
  std::vector<double> rates;
  /// 1-based end slot of each constant-rate segment; the last is N.
  std::vector<std::size_t> segment_ends;
  /// tight[s][j]: stream j attains the segment's rate at its end.
  std::vector<std::vector<bool>> tight;
};

/// Greedy segment construction: from the current start, every candidate end
/// gives the rate each stream could sustain on average; the segment rate is
/// the smallest over ends and streams, and the segment closes at the largest
/// end attaining it. Residual budgets are charged and the sweep continues.
Staircase solve_staircase(std::span<const BudgetStream> streams);

}  // namespace ehdc

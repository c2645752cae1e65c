#pragma once

#include "ehdc/model.hpp"

namespace ehdc {

/// Relay energy set aside for decoding in each slot.
struct RelayDecodingStrategy {
  PowerPolicy delta;
};

struct TwoHopSolution {
  RatePolicy source_rates;
  RatePolicy relay_rates;
  RelayDecodingStrategy delta;
  double throughput = 0.0;
  bool converged = true;
};

/// Best source and relay rates for a fixed decoding allocation. The source
/// solves its own link against the relay's decoding budget; the relay then
/// forwards under its remaining energy, the destination's decoding energy and
/// the data it has received so far.
/// InfeasibleError when delta overdraws the relay.
TwoHopSolution solve_inner(const Scenario& scenario,
                           const RelayDecodingStrategy& delta);

/// Maximizes end-to-end throughput over the relay decoding allocation.
TwoHopSolution solve_two_hop(const Scenario& scenario, double tol = 1e-6,
                             int max_iters = 10'000);

}  // namespace ehdc

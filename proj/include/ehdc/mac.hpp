#pragma once

#include <optional>
#include <utility>

#include "ehdc/region.hpp"

namespace ehdc {

/// Best sum of g(p1 + p2) over user 2's powers for fixed user-1 powers, with
/// user 2 limited by its own harvest and what the receiver has left after
/// p1. Returns (value, p2).
std::pair<double, PowerPolicy> mac_inner(const Scenario& scenario,
                                         std::span<const double> p1);

/// Weighted-sum boundary point with joint decoding at the receiver. Needs a
/// decoding cost equal to the inverse rate map (UnsupportedError otherwise).
RegionPoint solve_mac_simultaneous(const Scenario& scenario,
                                   const WeightPair& weights,
                                   double tol = 1e-9);

struct ScaOptions {
  double tol = 1e-8;
  int max_iters = 200;
};

/// Lower-corner operation with successive cancellation: the higher-weight
/// user is decoded last. Runs successive convex approximation over
/// geometric programs from `init` (per-user powers, original labels) or, if
/// absent, from the mapped simultaneous solution. Local optimum only.
RegionPoint solve_mac_successive(
    const Scenario& scenario, const WeightPair& weights,
    const std::optional<std::pair<PowerPolicy, PowerPolicy>>& init = {},
    const ScaOptions& options = {});

/// Boundary points over weight_grid(n_weights).
DepartureRegion sweep_region(const Scenario& scenario, DecodingMode mode,
                             int n_weights, double tol = 1e-9,
                             const ScaOptions& sca = {});

}  // namespace ehdc

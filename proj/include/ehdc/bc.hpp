#pragma once

#include "ehdc/region.hpp"

namespace ehdc {

/// Transmit power for rates (r1, r2) under superposition coding with noise
/// variances 1 and sigma2: (sigma2 - 1) f(r2) + f(r1 + r2), where f is the
/// power map of the chosen log base. DomainError for negative rates or
/// sigma2 <= 1.
double bc_min_power(double r1, double r2, double sigma2,
                    LogBase base = LogBase::Base2);

/// Best total power schedule p_t for a fixed non-decreasing weak-user power
/// p2 (which acts as a per-slot minimum). Returns (sum of g(p_t), p_t).
std::pair<double, PowerPolicy> bc_inner(const Scenario& scenario,
                                        std::span<const double> p2);

/// Weighted-sum boundary point of the degraded BC. `first` holds p_t and
/// `second` holds p2.
RegionPoint solve_bc(const Scenario& scenario, const WeightPair& weights,
                     double tol = 1e-9);

/// Boundary points over weight_grid(n_weights).
DepartureRegion sweep_bc_region(const Scenario& scenario, int n_weights,
                                double tol = 1e-9);

}  // namespace ehdc

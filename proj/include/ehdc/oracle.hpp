#pragma once

#include <string>
#include <vector>

#include "ehdc/region.hpp"

namespace ehdc::oracle {

/// Grid resolution and per-slot upper bound (a rate or a power, depending
/// on the search space).
struct GridSpec {
  double step = 1e-3;
  double bound = 1.0;

  GridSpec(double s, double b);
};

struct OracleResult {
  /// Topology dependent: rates; (source, relay) rates; (p1, p2); (p_t, p2).
  std::vector<std::vector<double>> policies;
  double value = 0.0;
};

/// Largest throughput over rate vectors on the grid meeting both cumulative
/// energy families. N <= 4; OracleRefusal above the work guard.
OracleResult oracle_single_user(const EnergyProfile& tx,
                                const EnergyProfile& rx, const LinkModel& link,
                                const GridSpec& grid);

/// Two-hop throughput for a fixed relay decoding allocation, N <= 2.
OracleResult oracle_two_hop_inner(const Scenario& scenario,
                                  const PowerPolicy& delta,
                                  const GridSpec& grid);

/// Weighted objective maximized over the grid for any topology:
/// single-user and two-hop throughput (rate grid; N <= 4 and N <= 2),
/// MAC with joint decoding and BC (power grid, N <= 3).
OracleResult oracle_weighted(const Scenario& scenario,
                             const WeightPair& weights, const GridSpec& grid);

struct ConstraintSlack {
  std::string family;
  /// Budget minus use for every prefix k = 1..N.
  std::vector<double> slack;
  double min_slack = 0.0;
  /// 1-based prefix attaining min_slack.
  std::size_t argmin = 0;
};

struct AuditReport {
  std::vector<ConstraintSlack> families;
  bool feasible = true;
  /// First family and 1-based prefix with slack below -tol; 0 if none.
  std::string violated_family;
  std::size_t violated_prefix = 0;
};

/// Per-slot policies to audit. Only the fields a topology uses are read:
/// single-user `rates`; two-hop `rates` (source) and `relay_rates`;
/// MAC `p1`, `p2` (user powers) with decoding mode and, for successive
/// decoding, which user is decoded last; BC `p1` = p_t and `p2`.
struct Policies {
  std::vector<double> rates;
  std::vector<double> relay_rates;
  std::vector<double> p1;
  std::vector<double> p2;
  DecodingMode mode = DecodingMode::Simultaneous;
  int decoded_last = 1;
};

/// Replays every cumulative constraint family of the scenario's topology.
AuditReport audit(const Scenario& scenario, const Policies& policies,
                  double tol = 1e-9);

}  // namespace ehdc::oracle

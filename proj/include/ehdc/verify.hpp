#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ehdc/region.hpp"
#include "ehdc/single_user.hpp"

namespace ehdc::verify {

/// Seeded generator whose draws do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  /// Uniform on [a, b).
  double uniform(double a, double b);
  /// Uniform integer on [a, b].
  int integer(int a, int b);

 private:
  std::mt19937_64 gen_;
};

/// Empty when the property holds, otherwise a description of the failure.
using Failure = std::optional<std::string>;

std::vector<double> uniform_vector(Rng& rng, std::size_t n, double lo,
                                   double hi);

Scenario make_single_user(std::vector<double> tx, std::vector<double> rx,
                          LogBase base = LogBase::Natural);
Scenario make_two_hop(std::vector<double> e, std::vector<double> relay,
                      std::vector<double> dest);
Scenario make_mac(std::vector<double> e1, std::vector<double> e2,
                  std::vector<double> rx);
Scenario make_bc(std::vector<double> e, std::vector<double> rx1,
                 std::vector<double> rx2, double sigma2);

/// Rates non-decreasing; at each strict increase and at slot N one of the
/// two cumulative energy constraints is tight.
Failure check_single_user_lemmas(const EnergyProfile& tx,
                                 const EnergyProfile& rx,
                                 const LinkModel& link,
                                 const StaircaseSolution& sol,
                                 double tol = 1e-6);

/// Joint-decoding MAC optimum with both weights positive: both transmitters
/// or the receiver use up their total energy.
Failure check_mac_exhaustion(const Scenario& s, const RegionPoint& p,
                             double tol = 1e-6);

/// Points sorted by b1 have non-increasing boundary slopes.
Failure check_region_concave(const DepartureRegion& region,
                             double tol = 1e-6);

/// Every SCA iterate is feasible for the original successive-decoding
/// constraints and the weighted objective never decreases.
Failure check_sca_contract(const Scenario& s, const RegionPoint& p,
                           double feas_tol = 1e-9, double mono_tol = 1e-10);

/// Sum rate, weak rate and p_t non-decreasing; every strict increase of p_t
/// meets its minimum at k+1 or exhausts the cumulative budget at k.
Failure check_bc_structure(const Scenario& s, const RegionPoint& p,
                           double tol = 1e-6);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs "lemmas", "oracle" or "all". std::invalid_argument for other names.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t seed);

}  // namespace ehdc::verify

#include "ehdc/two_hop.hpp"

#include <algorithm>

#include "ehdc/single_user.hpp"
#include "ehdc/staircase.hpp"
#include "ehdc/waterfill.hpp"

namespace ehdc {

namespace {

TwoHopSolution inner_unchecked(const Scenario& s, const PowerPolicy& delta) {
  const EnergyProfile& relay = s.profile(Role::Relay);
  const EnergyProfile& dest = s.profile(Role::Rx);
  const LinkModel& link = s.link;

  StaircaseSolution src = solve_single_user(
      s.profile(Role::Tx), EnergyProfile(std::vector<double>(delta.begin(),
                                                             delta.end())),
      link);

  const std::vector<double> relay_cum = relay.cumulative();
  const std::vector<double> delta_cum = delta.cumulative();
  std::vector<double> left(relay_cum.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    left[i] = relay_cum[i] - delta_cum[i];
  }
  const std::vector<double> transmit =
      effective_profile(left, 1e-9 * (1.0 + relay.total())).cumulative();

  const BudgetStream streams[] = {
      {transmit, [&](double e) { return link.rate(e); },
       [&](double r) { return link.power(r); }},
      {dest.cumulative(), [&](double e) { return link.decodable_rate(e); },
       [&](double r) { return link.decoding_cost(r); }},
      {src.rates.cumulative(), [](double e) { return e; },
       [](double r) { return r; }},
  };
  Staircase st = solve_staircase(streams);

  TwoHopSolution out{src.rates, RatePolicy(std::move(st.rates)), {delta}, 0.0,
                     true};
  out.throughput = out.relay_rates.total();
  return out;
}

}  // namespace

TwoHopSolution solve_inner(const Scenario& scenario,
                           const RelayDecodingStrategy& delta) {
  require_valid(scenario, Topology::TwoHop);
  const EnergyProfile& relay = scenario.profile(Role::Relay);
  if (delta.delta.size() != relay.size()) {
    throw StructuralError("decoding allocation length differs from N");
  }
  const std::vector<double> d = delta.delta.cumulative();
  const std::vector<double> r = relay.cumulative();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] > r[k] + kFeasibilityTol) {
      throw InfeasibleError("decoding allocation overdraws the relay", k + 1);
    }
  }
  return inner_unchecked(scenario, delta.delta);
}

TwoHopSolution solve_two_hop(const Scenario& scenario, double tol,
                             int max_iters) {
  require_valid(scenario, Topology::TwoHop);
  const EnergyProfile& relay = scenario.profile(Role::Relay);
  waterfill::OuterProblem problem{
      [&](std::span<const double> x) {
        return inner_unchecked(
                   scenario, PowerPolicy(std::vector<double>(x.begin(), x.end())))
            .throughput;
      },
      relay, true, false};
  const waterfill::OuterResult res =
      waterfill::outer_waterflow(problem, {tol, max_iters});
  TwoHopSolution sol = inner_unchecked(scenario, PowerPolicy(res.allocation));
  sol.converged = res.converged;
  return sol;
}

}  // namespace ehdc

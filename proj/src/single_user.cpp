#include "ehdc/single_user.hpp"

#include "ehdc/staircase.hpp"
#include "ehdc/waterfill.hpp"

namespace ehdc {

std::string to_string(Binding b) {
  switch (b) {
    case Binding::TxEnergy: return "tx_energy";
    case Binding::RxEnergy: return "rx_energy";
    case Binding::Both: return "both";
  }
  return "?";
}

StaircaseSolution solve_single_user(const EnergyProfile& tx,
                                    const EnergyProfile& rx,
                                    const LinkModel& link) {
  if (tx.size() != rx.size()) {
    throw StructuralError("transmitter and receiver profiles differ in length");
  }
  const BudgetStream streams[] = {
      {tx.cumulative(), [&](double e) { return link.rate(e); },
       [&](double r) { return link.power(r); }},
      {rx.cumulative(), [&](double e) { return link.decodable_rate(e); },
       [&](double r) { return link.decoding_cost(r); }},
  };
  Staircase st = solve_staircase(streams);

  StaircaseSolution sol{RatePolicy(std::move(st.rates)),
                        std::move(st.segment_ends),
                        {}};
  for (const auto& t : st.tight) {
    if (t[0] && t[1]) {
      sol.binding.push_back(Binding::Both);
    } else {
      sol.binding.push_back(t[1] ? Binding::RxEnergy : Binding::TxEnergy);
    }
  }
  return sol;
}

RatePolicy solve_single_user_no_battery(const EnergyProfile& tx,
                                        const EnergyProfile& rx,
                                        const LinkModel& link) {
  if (tx.size() != rx.size()) {
    throw StructuralError("transmitter and receiver profiles differ in length");
  }
  std::vector<waterfill::Bin> bins(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const double r = link.decodable_rate(rx[i]);
    if (r <= kRateCap) bins[i].cap = link.power(r);
  }
  const PowerPolicy p = waterfill::directional_waterfill(bins, tx);
  std::vector<double> rates(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) rates[i] = link.rate(p[i]);
  return RatePolicy(std::move(rates));
}

PowerPolicy powers_for(const RatePolicy& rates, const LinkModel& link) {
  std::vector<double> p(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) p[i] = link.power(rates[i]);
  return PowerPolicy(std::move(p));
}

}  // namespace ehdc

#pragma once

#include <vector>

#include "ehdc/model.hpp"

namespace ehdc {

/// Which budget limits a constant-rate segment.
enum class Binding { TxEnergy, RxEnergy, Both };

std::string to_string(Binding b);

struct StaircaseSolution {
  RatePolicy rates;
  /// 1-based last slot of each segment, strictly increasing, ending at N.
  std::vector<std::size_t> change_points;
  std::vector<Binding> binding;

  double throughput() const { return rates.total(); }
};

/// Throughput-optimal rates for a transmitter with harvest `tx` and a
/// receiver that pays decoding energy out of harvest `rx`. Zero energies give
/// zero rates.
StaircaseSolution solve_single_user(const EnergyProfile& tx,
                                    const EnergyProfile& rx,
                                    const LinkModel& link);

/// Receiver without a battery: each slot's rate is capped by what that slot's
/// harvest can decode. Energy the caps cannot absorb is wasted.
RatePolicy solve_single_user_no_battery(const EnergyProfile& tx,
                                        const EnergyProfile& rx,
                                        const LinkModel& link);

/// Per-slot transmit powers f(r).
PowerPolicy powers_for(const RatePolicy& rates, const LinkModel& link);

}  // namespace ehdc

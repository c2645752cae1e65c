#pragma once

// Core domain types shared by every solver: per-slot sequences, the
// rate/power map of the channel, the receiver decoding cost, and the
// Scenario bundle read by the CLI.

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ehdc/errors.hpp"

namespace ehdc {

/// Rates above this value (nats or bits per slot) are rejected before any
/// exponentiation.
inline constexpr double kRateCap = 60.0;

/// Default absolute tolerance for cumulative feasibility checks.
inline constexpr double kFeasibilityTol = 1e-9;

/// Finite, non-negative per-slot sequence of length >= 1. The tag keeps
/// energies, rates and powers from being mixed up.
template <class Tag>
class SlotSequence {
 public:
  explicit SlotSequence(std::vector<double> values);
  SlotSequence(std::initializer_list<double> values)
      : SlotSequence(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  double total() const;
  /// Prefix sums; entry k holds the sum of slots 0..k.
  std::vector<double> cumulative() const;

  friend bool operator==(const SlotSequence&, const SlotSequence&) = default;

 private:
  std::vector<double> values_;
};

struct EnergyTag;
struct RateTag;
struct PowerTag;

/// Energy harvested per slot by one node.
using EnergyProfile = SlotSequence<EnergyTag>;
/// Per-slot rates in nats (natural log) or bits (base 2).
using RatePolicy = SlotSequence<RateTag>;
/// Per-slot transmit (or decoding) powers.
using PowerPolicy = SlotSequence<PowerTag>;

extern template class SlotSequence<EnergyTag>;
extern template class SlotSequence<RateTag>;
extern template class SlotSequence<PowerTag>;

/// Prefix sums of an arbitrary sequence.
std::vector<double> prefix_sums(std::span<const double> values);

/// Builds an energy profile from cumulative budgets that may dip. Since every
/// consumption is non-negative, budget k is effectively the minimum of all
/// budgets from k onward; the result has non-negative increments.
/// Throws InfeasibleError if any cumulative budget is below -tol.
EnergyProfile effective_profile(std::span<const double> cumulative,
                                double tol = kFeasibilityTol);

enum class LogBase { Natural, Base2 };

/// Shannon-type rate/power map: log(1+p) in nats, or (1/2)log2(1+p) in bits.
class RateFunction {
 public:
  explicit RateFunction(LogBase base = LogBase::Natural) : base_(base) {}

  LogBase base() const noexcept { return base_; }

  /// Rate carried by transmit power `power` (>= 0).
  double rate(double power) const;
  /// Power needed for `rate`; inverse of rate(). DomainError above kRateCap.
  double power(double rate) const;

  friend bool operator==(const RateFunction&, const RateFunction&) = default;

 private:
  LogBase base_;
};

/// Receiver energy spent to decode one slot at a given incoming rate.
class DecodingFunction {
 public:
  enum class Kind { Linear, Exponential, InverseRate };

  /// a*r + b, a > 0, b >= 0.
  static DecodingFunction linear(double a, double b);
  /// c*2^(d*r) + e, c > 0, d > 0, c + e >= 0. Defined on base-2 rates.
  static DecodingFunction exponential(double c, double d, double e);
  /// The inverse of the link's rate function: decoding costs exactly the
  /// transmit power that produced the rate.
  static DecodingFunction inverse_rate();

  Kind kind() const noexcept { return kind_; }
  double a() const noexcept { return p0_; }
  double b() const noexcept { return p1_; }
  double c() const noexcept { return p0_; }
  double d() const noexcept { return p1_; }
  double e() const noexcept { return p2_; }

  friend bool operator==(const DecodingFunction&,
                         const DecodingFunction&) = default;

 private:
  DecodingFunction(Kind kind, double p0, double p1, double p2)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

  Kind kind_;
  double p0_;
  double p1_;
  double p2_;
};

/// Rate function plus decoding function for one link.
class LinkModel {
 public:
  /// StructuralError when an exponential decoding cost (base-2 by
  /// construction) is paired with a natural-log rate function.
  LinkModel(RateFunction rate, DecodingFunction decoding);

  const RateFunction& rate_function() const noexcept { return rate_; }
  const DecodingFunction& decoding() const noexcept { return decoding_; }

  double rate(double power) const { return rate_.rate(power); }
  double power(double rate) const { return rate_.power(rate); }

  /// Decoding energy for `rate`. DomainError for negative rates or rates
  /// above kRateCap.
  double decoding_cost(double rate) const;
  /// Largest rate whose decoding cost is `energy`; 0 when `energy` is below
  /// the zero-rate cost.
  double decodable_rate(double energy) const;

  /// True when decoding cost equals rate-to-power, i.e. phi(g(p)) = p.
  bool decoding_is_inverse_rate() const noexcept;

  friend bool operator==(const LinkModel&, const LinkModel&) = default;

 private:
  RateFunction rate_;
  DecodingFunction decoding_;
};

/// Decoding energy for `rate` on `link`; DomainError for negative rates.
double decoding_power(double rate, const LinkModel& link);

/// True iff every prefix of `policy` fits within the same prefix of
/// `profile` plus `tol`. StructuralError on length mismatch.
bool cumulative_feasible(const PowerPolicy& policy,
                         const EnergyProfile& profile,
                         double tol = kFeasibilityTol);

enum class Topology { SingleUser, TwoHop, Mac, Bc };
enum class Role { Tx, Rx, Relay, Tx1, Tx2, Rx1, Rx2 };

std::string to_string(Topology t);
std::string to_string(Role r);

/// Roles whose energy profile a topology needs.
std::vector<Role> required_roles(Topology t);

/// One full problem instance.
struct Scenario {
  Topology topology = Topology::SingleUser;
  std::map<Role, EnergyProfile> energy;
  LinkModel link{RateFunction{}, DecodingFunction::inverse_rate()};
  double bc_noise_sigma2 = 2.0;
  bool rx_has_battery = true;

  /// StructuralError if the role has no profile.
  const EnergyProfile& profile(Role role) const;
  /// Slot count N taken from the first required profile present.
  std::size_t slots() const;
};

/// Human-readable list of violated invariants; empty when well formed.
std::vector<std::string> check_scenario(const Scenario& s);

/// Throws StructuralError carrying every violation if check_scenario finds
/// any, or if the topology is not `expected`.
void require_valid(const Scenario& s, Topology expected);

}  // namespace ehdc

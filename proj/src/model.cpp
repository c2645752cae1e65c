#include "ehdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ehdc {

template <class Tag>
SlotSequence<Tag>::SlotSequence(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw DomainError("slot sequence must have at least one slot");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      std::ostringstream msg;
      msg << "slot " << i + 1 << " holds " << values_[i]
          << "; entries must be finite and non-negative";
      throw DomainError(msg.str());
    }
  }
}

template <class Tag>
double SlotSequence<Tag>::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

template <class Tag>
std::vector<double> SlotSequence<Tag>::cumulative() const {
  return prefix_sums(values_);
}

template class SlotSequence<EnergyTag>;
template class SlotSequence<RateTag>;
template class SlotSequence<PowerTag>;

std::vector<double> prefix_sums(std::span<const double> values) {
  std::vector<double> out(values.size());
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += values[i];
    out[i] = s;
  }
  return out;
}

EnergyProfile effective_profile(std::span<const double> cumulative,
                                double tol) {
  const std::size_t n = cumulative.size();
  if (n == 0) throw StructuralError("empty cumulative budget");
  std::vector<double> eff(cumulative.begin(), cumulative.end());
  for (std::size_t k = n - 1; k-- > 0;) eff[k] = std::min(eff[k], eff[k + 1]);
  for (std::size_t k = 0; k < n; ++k) {
    if (eff[k] < -tol) {
      throw InfeasibleError("cumulative budget is negative", k + 1);
    }
  }
  std::vector<double> inc(n);
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = std::max(eff[k], prev);
    inc[k] = c - prev;
    prev = c;
  }
  return EnergyProfile(std::move(inc));
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_rate(double r) {
  if (!(r >= 0.0)) throw DomainError("rate must be non-negative");
  if (r > kRateCap) {
    std::ostringstream msg;
    msg << "rate " << r << " exceeds the cap of " << kRateCap;
    throw DomainError(msg.str());
  }
}

}  // namespace

double RateFunction::rate(double power) const {
  if (!(power >= 0.0)) throw DomainError("power must be non-negative");
  return base_ == LogBase::Natural ? std::log1p(power)
                                   : 0.5 * std::log1p(power) / kLn2;
}

double RateFunction::power(double rate) const {
  check_rate(rate);
  return base_ == LogBase::Natural ? std::expm1(rate)
                                   : std::expm1(2.0 * kLn2 * rate);
}

DecodingFunction DecodingFunction::linear(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("linear decoding needs a > 0 and b >= 0");
  }
  return DecodingFunction(Kind::Linear, a, b, 0.0);
}

DecodingFunction DecodingFunction::exponential(double c, double d, double e) {
  if (!(c > 0.0) || !(d > 0.0) || !(c + e >= 0.0) || !std::isfinite(c) ||
      !std::isfinite(d) || !std::isfinite(e)) {
    throw DomainError("exponential decoding needs c > 0, d > 0, c + e >= 0");
  }
  return DecodingFunction(Kind::Exponential, c, d, e);
}

DecodingFunction DecodingFunction::inverse_rate() {
  return DecodingFunction(Kind::InverseRate, 0.0, 0.0, 0.0);
}

LinkModel::LinkModel(RateFunction rate, DecodingFunction decoding)
    : rate_(rate), decoding_(decoding) {
  if (decoding_.kind() == DecodingFunction::Kind::Exponential &&
      rate_.base() != LogBase::Base2) {
    throw StructuralError(
        "exponential decoding is defined on base-2 rates; the rate function "
        "uses natural log");
  }
}

double LinkModel::decoding_cost(double rate) const {
  check_rate(rate);
  switch (decoding_.kind()) {
    case DecodingFunction::Kind::Linear:
      return decoding_.a() * rate + decoding_.b();
    case DecodingFunction::Kind::Exponential:
      // c*(2^{dr} - 1) + (c + e), written to keep precision near r = 0.
      return decoding_.c() * std::expm1(decoding_.d() * kLn2 * rate) +
             (decoding_.c() + decoding_.e());
    case DecodingFunction::Kind::InverseRate:
      return rate_.power(rate);
  }
  return 0.0;
}

double LinkModel::decodable_rate(double energy) const {
  if (std::isnan(energy)) throw DomainError("energy is NaN");
  switch (decoding_.kind()) {
    case DecodingFunction::Kind::Linear:
      return std::max(0.0, (energy - decoding_.b()) / decoding_.a());
    case DecodingFunction::Kind::Exponential: {
      const double floor = decoding_.c() + decoding_.e();
      if (energy <= floor) return 0.0;
      return std::log1p((energy - floor) / decoding_.c()) /
             (decoding_.d() * kLn2);
    }
    case DecodingFunction::Kind::InverseRate:
      return energy <= 0.0 ? 0.0 : rate_.rate(energy);
  }
  return 0.0;
}

bool LinkModel::decoding_is_inverse_rate() const noexcept {
  if (decoding_.kind() == DecodingFunction::Kind::InverseRate) return true;
  // 2^{2r} - 1 is the base-2 inverse of (1/2)log2(1+p).
  return decoding_.kind() == DecodingFunction::Kind::Exponential &&
         rate_.base() == LogBase::Base2 && decoding_.c() == 1.0 &&
         decoding_.d() == 2.0 && decoding_.e() == -1.0;
}

double decoding_power(double rate, const LinkModel& link) {
  return link.decoding_cost(rate);
}

bool cumulative_feasible(const PowerPolicy& policy,
                         const EnergyProfile& profile, double tol) {
  if (policy.size() != profile.size()) {
    throw StructuralError("policy and profile lengths differ");
  }
  double spent = 0.0;
  double harvested = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    spent += policy[i];
    harvested += profile[i];
    if (spent > harvested + tol) return false;
  }
  return true;
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::SingleUser: return "single_user";
    case Topology::TwoHop: return "two_hop";
    case Topology::Mac: return "mac";
    case Topology::Bc: return "bc";
  }
  return "?";
}

std::string to_string(Role r) {
  switch (r) {
    case Role::Tx: return "tx";
    case Role::Rx: return "rx";
    case Role::Relay: return "relay";
    case Role::Tx1: return "tx1";
    case Role::Tx2: return "tx2";
    case Role::Rx1: return "rx1";
    case Role::Rx2: return "rx2";
  }
  return "?";
}

std::vector<Role> required_roles(Topology t) {
  switch (t) {
    case Topology::SingleUser: return {Role::Tx, Role::Rx};
    case Topology::TwoHop: return {Role::Tx, Role::Relay, Role::Rx};
    case Topology::Mac: return {Role::Tx1, Role::Tx2, Role::Rx};
    case Topology::Bc: return {Role::Tx, Role::Rx1, Role::Rx2};
  }
  return {};
}

const EnergyProfile& Scenario::profile(Role role) const {
  auto it = energy.find(role);
  if (it == energy.end()) {
    throw StructuralError("scenario has no energy profile for role " +
                          to_string(role));
  }
  return it->second;
}

std::size_t Scenario::slots() const {
  for (Role r : required_roles(topology)) {
    auto it = energy.find(r);
    if (it != energy.end()) return it->second.size();
  }
  return 0;
}

std::vector<std::string> check_scenario(const Scenario& s) {
  std::vector<std::string> out;
  const auto roles = required_roles(s.topology);
  std::size_t n = 0;
  for (Role r : roles) {
    auto it = s.energy.find(r);
    if (it == s.energy.end()) {
      out.push_back("missing energy profile for role '" + to_string(r) + "'");
      continue;
    }
    if (n == 0) {
      n = it->second.size();
    } else if (it->second.size() != n) {
      std::ostringstream msg;
      msg << "energy profile '" << to_string(r) << "' has "
          << it->second.size() << " slots, expected " << n;
      out.push_back(msg.str());
    }
  }
  if (s.topology == Topology::Bc && !(s.bc_noise_sigma2 > 1.0)) {
    std::ostringstream msg;
    msg << "bc_noise_sigma2 = " << s.bc_noise_sigma2 << " must exceed 1";
    out.push_back(msg.str());
  }
  return out;
}

void require_valid(const Scenario& s, Topology expected) {
  if (s.topology != expected) {
    throw StructuralError("solver for " + to_string(expected) +
                          " called on a " + to_string(s.topology) +
                          " scenario");
  }
  const auto v = check_scenario(s);
  if (v.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& line : v) msg += " " + line + ";";
  throw StructuralError(msg);
}

}  // namespace ehdc

#include "ehdc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "ehdc/bc.hpp"
#include "ehdc/mac.hpp"
#include "ehdc/oracle.hpp"
#include "ehdc/two_hop.hpp"
#include "ehdc/waterfill.hpp"

namespace ehdc::verify {

double Rng::uniform(double a, double b) {
  const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

int Rng::integer(int a, int b) {
  const auto span = static_cast<std::uint64_t>(b - a + 1);
  return a + static_cast<int>(gen_() % span);
}

std::vector<double> uniform_vector(Rng& rng, std::size_t n, double lo,
                                   double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

Scenario make_single_user(std::vector<double> tx, std::vector<double> rx,
                          LogBase base) {
  Scenario s;
  s.topology = Topology::SingleUser;
  s.energy.emplace(Role::Tx, EnergyProfile(std::move(tx)));
  s.energy.emplace(Role::Rx, EnergyProfile(std::move(rx)));
  s.link = LinkModel(RateFunction(base), DecodingFunction::inverse_rate());
  return s;
}

Scenario make_two_hop(std::vector<double> e, std::vector<double> relay,
                      std::vector<double> dest) {
  Scenario s;
  s.topology = Topology::TwoHop;
  s.energy.emplace(Role::Tx, EnergyProfile(std::move(e)));
  s.energy.emplace(Role::Relay, EnergyProfile(std::move(relay)));
  s.energy.emplace(Role::Rx, EnergyProfile(std::move(dest)));
  return s;
}

Scenario make_mac(std::vector<double> e1, std::vector<double> e2,
                  std::vector<double> rx) {
  Scenario s;
  s.topology = Topology::Mac;
  s.energy.emplace(Role::Tx1, EnergyProfile(std::move(e1)));
  s.energy.emplace(Role::Tx2, EnergyProfile(std::move(e2)));
  s.energy.emplace(Role::Rx, EnergyProfile(std::move(rx)));
  return s;
}

Scenario make_bc(std::vector<double> e, std::vector<double> rx1,
                 std::vector<double> rx2, double sigma2) {
  Scenario s;
  s.topology = Topology::Bc;
  s.energy.emplace(Role::Tx, EnergyProfile(std::move(e)));
  s.energy.emplace(Role::Rx1, EnergyProfile(std::move(rx1)));
  s.energy.emplace(Role::Rx2, EnergyProfile(std::move(rx2)));
  s.bc_noise_sigma2 = sigma2;
  return s;
}

namespace {

std::string fmt(const char* what, std::size_t k, double a, double b) {
  std::ostringstream msg;
  msg.precision(12);
  msg << what << " at slot " << k << ": " << a << " vs " << b;
  return msg.str();
}

}  // namespace

Failure check_single_user_lemmas(const EnergyProfile& tx,
                                 const EnergyProfile& rx,
                                 const LinkModel& link,
                                 const StaircaseSolution& sol, double tol) {
  const std::size_t n = tx.size();
  const double scale = std::max({1.0, tx.total(), rx.total()});
  const double t = tol * scale;
  const std::vector<double> ce = tx.cumulative();
  const std::vector<double> cr = rx.cumulative();
  std::vector<double> ue(n), ur(n);
  double se = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = sol.rates[i];
    se += r > 0.0 ? link.power(r) : 0.0;
    sr += r > 0.0 ? link.decoding_cost(r) : 0.0;
    ue[i] = se;
    ur[i] = sr;
    if (ue[i] > ce[i] + t || ur[i] > cr[i] + t) {
      return fmt("cumulative constraint violated", i + 1, ue[i], ce[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sol.rates[i + 1] < sol.rates[i] - tol) {
      return fmt("rate decreases", i + 2, sol.rates[i + 1], sol.rates[i]);
    }
    if (sol.rates[i + 1] > sol.rates[i] + tol) {
      if (ce[i] - ue[i] > t && cr[i] - ur[i] > t) {
        return fmt("rate rises with both budgets slack", i + 1, ce[i] - ue[i],
                   cr[i] - ur[i]);
      }
    }
  }
  if (ce[n - 1] - ue[n - 1] > t && cr[n - 1] - ur[n - 1] > t) {
    return fmt("neither budget exhausted", n, ce[n - 1] - ue[n - 1],
               cr[n - 1] - ur[n - 1]);
  }
  return std::nullopt;
}

Failure check_mac_exhaustion(const Scenario& s, const RegionPoint& p,
                             double tol) {
  const double e1 = s.profile(Role::Tx1).total();
  const double e2 = s.profile(Role::Tx2).total();
  const double rx = s.profile(Role::Rx).total();
  const double t = tol * std::max({1.0, e1, e2, rx});
  const double u1 = p.first.total(), u2 = p.second.total();
  const bool tx_both = e1 - u1 <= t && e2 - u2 <= t;
  const bool rx_done = rx - (u1 + u2) <= t;
  if (tx_both || rx_done) return std::nullopt;
  std::ostringstream msg;
  msg << "slack left: tx1 " << e1 - u1 << ", tx2 " << e2 - u2 << ", rx "
      << rx - u1 - u2;
  return msg.str();
}

Failure check_region_concave(const DepartureRegion& region, double tol) {
  std::vector<std::pair<double, double>> pts;
  for (const RegionPoint& p : region.points) pts.emplace_back(p.b1, p.b2);
  std::sort(pts.begin(), pts.end());
  // Merge points sharing b1 (to 1e-6), keeping the highest b2.
  std::vector<std::pair<double, double>> m;
  for (const auto& q : pts) {
    if (!m.empty() && q.first - m.back().first <= 1e-6) {
      m.back().second = std::max(m.back().second, q.second);
    } else {
      m.push_back(q);
    }
  }
  for (std::size_t j = 0; j + 2 < m.size(); ++j) {
    const double s1 = (m[j + 1].second - m[j].second) /
                      (m[j + 1].first - m[j].first);
    const double s2 = (m[j + 2].second - m[j + 1].second) /
                      (m[j + 2].first - m[j + 1].first);
    if (s2 > s1 + tol) return fmt("slope increases", j + 2, s2, s1);
  }
  return std::nullopt;
}

Failure check_sca_contract(const Scenario& s, const RegionPoint& p,
                           double feas_tol, double mono_tol) {
  const bool first_last = p.weights.mu1 >= p.weights.mu2;
  const std::vector<double> cl =
      s.profile(first_last ? Role::Tx1 : Role::Tx2).cumulative();
  const std::vector<double> cf =
      s.profile(first_last ? Role::Tx2 : Role::Tx1).cumulative();
  const std::vector<double> cr = s.profile(Role::Rx).cumulative();
  for (std::size_t it = 0; it < p.trace.size(); ++it) {
    const SuccessiveIterate& x = p.trace[it];
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t i = 0; i < x.x1.size(); ++i) {
      a += x.x1[i];
      b += (1.0 + x.x1[i]) * x.x2[i];
      c += x.x1[i] + x.x2[i];
      if (a > cl[i] + feas_tol || b > cf[i] + feas_tol ||
          c > cr[i] + feas_tol) {
        std::ostringstream msg;
        msg << "iterate " << it << " infeasible at slot " << i + 1;
        return msg.str();
      }
    }
    if (it > 0 && x.value < p.trace[it - 1].value - mono_tol) {
      return fmt("objective decreased at iterate", it, x.value,
                 p.trace[it - 1].value);
    }
  }
  return std::nullopt;
}

Failure check_bc_structure(const Scenario& s, const RegionPoint& p,
                           double tol) {
  const std::size_t n = p.first.size();
  const LinkModel& link = s.link;
  const std::vector<double> ce = s.profile(Role::Tx).cumulative();
  const std::vector<double> c1 = s.profile(Role::Rx1).cumulative();
  const double scale = std::max({1.0, ce.back(), c1.back()});
  std::vector<double> b(n);
  double weak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weak += p.second[i];
    b[i] = std::min(c1[i], ce[i] - (s.bc_noise_sigma2 - 1.0) * weak);
  }
  const std::vector<double> v =
      effective_profile(b, 1e-9 * scale).cumulative();
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    used += p.first[i];
    const double sum0 = link.rate(p.first[i]);
    const double sum1 = link.rate(p.first[i + 1]);
    if (sum1 < sum0 - tol) return fmt("sum rate decreases", i + 2, sum1, sum0);
    const double w0 = link.rate(p.second[i]);
    const double w1 = link.rate(p.second[i + 1]);
    if (w1 < w0 - tol) return fmt("weak rate decreases", i + 2, w1, w0);
    if (p.first[i + 1] < p.first[i] - tol * scale) {
      return fmt("p_t decreases", i + 2, p.first[i + 1], p.first[i]);
    }
    if (p.first[i + 1] > p.first[i] + tol * scale) {
      const bool at_min =
          std::abs(p.first[i + 1] - p.second[i + 1]) <= tol * scale;
      const bool spent = v[i] - used <= tol * scale;
      if (!at_min && !spent) {
        return fmt("p_t rises without a binding reason", i + 1, v[i] - used,
                   p.first[i + 1] - p.second[i + 1]);
      }
    }
  }
  return std::nullopt;
}

namespace {

using Suite = std::function<Failure(Rng&)>;

Failure lemmas_single_user(Rng& rng) {
  for (int k = 0; k < 300; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 8));
    const EnergyProfile tx(uniform_vector(rng, n, 0.0, 3.0));
    const EnergyProfile rx(uniform_vector(rng, n, 0.0, 3.0));
    const LinkModel link =
        k % 3 == 2 ? LinkModel(RateFunction(),
                               DecodingFunction::linear(rng.uniform(0.5, 2), 0))
                   : LinkModel(RateFunction(), DecodingFunction::inverse_rate());
    const StaircaseSolution sol = solve_single_user(tx, rx, link);
    if (Failure f = check_single_user_lemmas(tx, rx, link, sol)) return f;
  }
  return std::nullopt;
}

Failure backward_fill_matches_pooled(Rng& rng) {
  for (int k = 0; k < 200; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 6));
    std::vector<double> mins = uniform_vector(rng, n, 0.0, 1.0);
    std::sort(mins.begin(), mins.end());
    std::vector<double> budget(n);
    double need = 0.0, have = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      need += mins[i];
      budget[i] = rng.uniform(0.0, 2.0);
      have += budget[i];
      if (have < need) {
        budget[i] += need - have;
        have = need;
      }
    }
    std::vector<waterfill::Bin> bins(n);
    for (std::size_t i = 0; i < n; ++i) bins[i].min_power = mins[i];
    const PowerPolicy a =
        waterfill::min_power_backward_fill(bins, EnergyProfile(budget));
    const std::vector<double> b = waterfill::detail::pooled_fill(bins, budget);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(a[i] - b[i]) > 1e-9 * (1.0 + have)) {
        return fmt("backward fill differs from pooled fill", i + 1, a[i], b[i]);
      }
    }
  }
  return std::nullopt;
}

Failure two_hop_separability(Rng& rng) {
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 6));
    const Scenario s = make_two_hop(uniform_vector(rng, n, 0, 3),
                                    uniform_vector(rng, n, 0, 3),
                                    uniform_vector(rng, n, 0, 3));
    std::vector<double> d(n);
    const EnergyProfile& relay = s.profile(Role::Relay);
    for (std::size_t i = 0; i < n; ++i) d[i] = relay[i] * rng.uniform(0, 1);
    const PowerPolicy delta(d);
    const TwoHopSolution sol = solve_inner(s, {delta});
    const StaircaseSolution src = solve_single_user(
        s.profile(Role::Tx), EnergyProfile(d), s.link);
    if (!(sol.source_rates == src.rates)) {
      return std::string("source rates differ from the single-user solve");
    }
  }
  return std::nullopt;
}

Failure two_hop_concavity(Rng& rng) {
  for (int k = 0; k < 30; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 4));
    const Scenario s = make_two_hop(uniform_vector(rng, n, 0, 3),
                                    uniform_vector(rng, n, 0, 3),
                                    uniform_vector(rng, n, 0, 3));
    const EnergyProfile& relay = s.profile(Role::Relay);
    std::vector<double> a(n), b(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = relay[i] * rng.uniform(0, 1);
      b[i] = relay[i] * rng.uniform(0, 1);
      m[i] = 0.5 * (a[i] + b[i]);
    }
    auto r = [&](const std::vector<double>& d) {
      return solve_inner(s, {PowerPolicy(d)}).throughput;
    };
    const double lhs = r(m), rhs = 0.5 * (r(a) + r(b));
    if (lhs < rhs - 1e-6) return fmt("midpoint below chord", k, lhs, rhs);
    const double r0 = r(std::vector<double>(n, 0.0));
    const double rfull = r(std::vector<double>(relay.begin(), relay.end()));
    if (r0 != 0.0 || rfull != 0.0) {
      return fmt("endpoint throughput nonzero", k, r0, rfull);
    }
  }
  return std::nullopt;
}

WeightPair random_weights(Rng& rng) {
  return WeightPair(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0))
      .normalized();
}

Failure mac_exhaustion(Rng& rng) {
  for (int k = 0; k < 10; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 3));
    const Scenario s = make_mac(uniform_vector(rng, n, 0, 2),
                                uniform_vector(rng, n, 0, 2),
                                uniform_vector(rng, n, 0, 2));
    const RegionPoint p = solve_mac_simultaneous(s, random_weights(rng));
    if (Failure f = check_mac_exhaustion(s, p)) return f;
  }
  return std::nullopt;
}

Failure bc_structure(Rng& rng) {
  for (int k = 0; k < 20; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 4));
    const Scenario s = make_bc(uniform_vector(rng, n, 0, 4),
                               uniform_vector(rng, n, 0, 3),
                               uniform_vector(rng, n, 0, 2),
                               rng.uniform(1.2, 4.0));
    const RegionPoint p = solve_bc(s, random_weights(rng));
    if (Failure f = check_bc_structure(s, p)) return f;
  }
  return std::nullopt;
}

// Grid optimum can trail the true optimum by at most the per-variable
// rounding loss, and can never exceed it.
Failure bracket(const char* what, double solver, double oracle, double slack) {
  if (solver < oracle - 1e-7 || solver > oracle + slack) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << ": solver " << solver << ", oracle " << oracle;
    return msg.str();
  }
  return std::nullopt;
}

Failure oracle_single_user(Rng& rng) {
  for (int k = 0; k < 8; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 3));
    const EnergyProfile tx(uniform_vector(rng, n, 0, 2));
    const EnergyProfile rx(uniform_vector(rng, n, 0, 2));
    const LinkModel link(RateFunction(), DecodingFunction::inverse_rate());
    const double v = solve_single_user(tx, rx, link).throughput();
    const double step = 1e-2;
    const auto o = oracle::oracle_single_user(tx, rx, link, {step, 2.0});
    if (Failure f = bracket("single-user", v, o.value,
                            step * static_cast<double>(n) + 1e-9)) {
      return f;
    }
  }
  return std::nullopt;
}

Failure oracle_two_hop(Rng& rng) {
  for (int k = 0; k < 4; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const Scenario s = make_two_hop(uniform_vector(rng, n, 0, 2),
                                    uniform_vector(rng, n, 0, 2),
                                    uniform_vector(rng, n, 0, 2));
    const double v = solve_two_hop(s).throughput;
    const double step = 1e-2;
    const auto o = oracle::oracle_weighted(s, {}, {step, 2.0});
    if (Failure f = bracket("two-hop", v, o.value,
                            3.0 * step * 2.0 * static_cast<double>(n))) {
      return f;
    }
  }
  return std::nullopt;
}

Failure oracle_mac_bc(Rng& rng) {
  for (int k = 0; k < 4; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const WeightPair w = random_weights(rng);
    const double step = 2e-2;
    const Scenario m = make_mac(uniform_vector(rng, n, 0, 0.8),
                                uniform_vector(rng, n, 0, 0.8),
                                uniform_vector(rng, n, 0, 0.8));
    const double vm = solve_mac_simultaneous(m, w).weighted_value();
    const auto om = oracle::oracle_weighted(m, w, {step, 2.0});
    if (Failure f = bracket("mac", vm, om.value,
                            3.0 * step * 2.0 * static_cast<double>(n))) {
      return f;
    }
    const Scenario b = make_bc(uniform_vector(rng, n, 0, 1.5),
                               uniform_vector(rng, n, 0, 1.0),
                               uniform_vector(rng, n, 0, 0.6), 2.0);
    const double vb = solve_bc(b, w).weighted_value();
    const auto ob = oracle::oracle_weighted(b, w, {step, 2.0});
    if (Failure f = bracket("bc", vb, ob.value,
                            3.0 * step * 2.0 * static_cast<double>(n))) {
      return f;
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, Suite>> suite_members(
    const std::string& suite) {
  std::vector<std::pair<std::string, Suite>> lemmas = {
      {"single_user.staircase", lemmas_single_user},
      {"waterfill.backward_fill_vs_pooled", backward_fill_matches_pooled},
      {"two_hop.separability", two_hop_separability},
      {"two_hop.concavity_and_endpoints", two_hop_concavity},
      {"mac.exhaustion", mac_exhaustion},
      {"bc.structure", bc_structure},
  };
  std::vector<std::pair<std::string, Suite>> oracles = {
      {"oracle.single_user", oracle_single_user},
      {"oracle.two_hop", oracle_two_hop},
      {"oracle.mac_and_bc", oracle_mac_bc},
  };
  if (suite == "lemmas") return lemmas;
  if (suite == "oracle") return oracles;
  if (suite == "all") {
    lemmas.insert(lemmas.end(), oracles.begin(), oracles.end());
    return lemmas;
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::uint64_t salt = 0;
  for (const auto& [name, fn] : suite_members(suite)) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + ++salt);
    CheckResult r{name, false, {}};
    try {
      const Failure f = fn(rng);
      r.passed = !f;
      if (f) r.detail = *f;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ehdc::verify

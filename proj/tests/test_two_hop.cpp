#include "doctest.h"

#include <cmath>

#include "ehdc/oracle.hpp"
#include "ehdc/two_hop.hpp"
#include "ehdc/verify.hpp"

using namespace ehdc;

namespace {

Scenario random_two_hop(verify::Rng& rng, std::size_t n, double hi = 3.0) {
  return verify::make_two_hop(verify::uniform_vector(rng, n, 0, hi),
                              verify::uniform_vector(rng, n, 0, hi),
                              verify::uniform_vector(rng, n, 0, hi));
}

PowerPolicy random_delta(verify::Rng& rng, const Scenario& s) {
  const EnergyProfile& relay = s.profile(Role::Relay);
  std::vector<double> d(relay.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = relay[i] * rng.uniform(0, 1);
  return PowerPolicy(std::move(d));
}

oracle::Policies policies(const TwoHopSolution& sol) {
  return {.rates = {sol.source_rates.begin(), sol.source_rates.end()},
          .relay_rates = {sol.relay_rates.begin(), sol.relay_rates.end()}};
}

}  // namespace

TEST_CASE("source rates equal the single-user solve against delta") {
  verify::Rng rng(200);
  for (int k = 0; k < 200; ++k) {
    const Scenario s =
        random_two_hop(rng, static_cast<std::size_t>(rng.integer(1, 6)));
    const PowerPolicy d = random_delta(rng, s);
    const TwoHopSolution sol = solve_inner(s, {d});
    const StaircaseSolution su = solve_single_user(
        s.profile(Role::Tx), EnergyProfile({d.begin(), d.end()}), s.link);
    REQUIRE(sol.source_rates.values().size() == su.rates.values().size());
    for (std::size_t i = 0; i < su.rates.size(); ++i) {
      CHECK(sol.source_rates[i] == su.rates[i]);
    }
  }
}

TEST_CASE("inner throughput is concave in delta with zero endpoints") {
  verify::Rng rng(50);
  for (int k = 0; k < 50; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 5));
    const Scenario s = random_two_hop(rng, n);
    const PowerPolicy a = random_delta(rng, s), b = random_delta(rng, s);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = 0.5 * (a[i] + b[i]);
    const double ra = solve_inner(s, {a}).throughput;
    const double rb = solve_inner(s, {b}).throughput;
    const double rm = solve_inner(s, {PowerPolicy(m)}).throughput;
    CHECK(rm >= 0.5 * (ra + rb) - 1e-6);

    const EnergyProfile& relay = s.profile(Role::Relay);
    CHECK(solve_inner(s, {PowerPolicy(std::vector<double>(n, 0.0))}).throughput == 0.0);
    CHECK(solve_inner(s, {PowerPolicy({relay.begin(), relay.end()})}).throughput == 0.0);
  }
}

TEST_CASE("inner policies are feasible and bounded by both hops") {
  verify::Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const Scenario s =
        random_two_hop(rng, static_cast<std::size_t>(rng.integer(1, 5)));
    const TwoHopSolution sol = solve_inner(s, {random_delta(rng, s)});
    CHECK(oracle::audit(s, policies(sol)).feasible);
    CHECK(sol.throughput == doctest::Approx(sol.relay_rates.total()));
    CHECK(sol.relay_rates.total() <= sol.source_rates.total() + 1e-9);
  }
}

TEST_CASE("overdrawn delta is infeasible") {
  const Scenario s = verify::make_two_hop({1, 1}, {1, 1}, {1, 1});
  CHECK_THROWS_AS(solve_inner(s, {PowerPolicy{1.5, 0.0}}), InfeasibleError);
}

TEST_CASE("inner solve matches the grid oracle") {
  verify::Rng rng(21);
  const double step = 1e-3;
  for (int k = 0; k < 10; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const Scenario s = random_two_hop(rng, n, 2.0);
    const PowerPolicy d = random_delta(rng, s);
    const double v = solve_inner(s, {d}).throughput;
    const double o = oracle::oracle_two_hop_inner(s, d, {step, 2.0}).value;
    CHECK(v >= o - 1e-9);
    CHECK(v <= o + 3.0 * step * 2.0 * static_cast<double>(n));
  }
}

TEST_CASE("outer optimization") {
  verify::Rng rng(33);
  for (int k = 0; k < 10; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const Scenario s = random_two_hop(rng, n, 2.0);
    const TwoHopSolution sol = solve_two_hop(s);
    CHECK(sol.converged);
    CHECK(oracle::audit(s, policies(sol)).feasible);
    // No random decoding split does better.
    for (int j = 0; j < 20; ++j) {
      CHECK(solve_inner(s, {random_delta(rng, s)}).throughput <=
            sol.throughput + 1e-6);
    }
    const double step = 1e-2;
    const double o = oracle::oracle_weighted(s, {}, {step, 2.0}).value;
    CHECK(sol.throughput >= o - 1e-6);
    CHECK(sol.throughput <= o + 3.0 * step * 2.0 * static_cast<double>(n));
  }
}

TEST_CASE("relay-limited chain") {
  // Plenty of everything except the relay, which must split 2 units between
  // decoding and forwarding in one slot: maximize min(g(d), g(2 - d)).
  const Scenario s = verify::make_two_hop({100}, {2}, {100});
  const TwoHopSolution sol = solve_two_hop(s, 1e-10);
  CHECK(sol.delta.delta[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sol.throughput == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("reference inner instance") {
  const Scenario s = verify::make_two_hop({2, 1}, {2, 1}, {1, 2});
  const PowerPolicy d{0.7, 0.3};
  const double v = solve_inner(s, {d}).throughput;
  const double o = oracle::oracle_two_hop_inner(s, d, {1e-2, 2.0}).value;
  CHECK(v >= o - 1e-9);
  CHECK(v <= o + 2e-2);
}

TEST_CASE("reference outer instance against a nested grid") {
  const Scenario s = verify::make_two_hop({2, 1}, {2, 1}, {1, 2});
  const TwoHopSolution sol = solve_two_hop(s);
  double best = 0.0;
  const double step = 1e-2;
  for (int a = 0; a <= 200; ++a) {
    for (int b = 0; a + b <= 300; ++b) {
      const double d0 = a * step, d1 = b * step;
      if (d0 > 2.0 + 1e-12) continue;
      best = std::max(best, solve_inner(s, {PowerPolicy{d0, d1}}).throughput);
    }
  }
  CHECK(sol.throughput >= best - 1e-9);
  CHECK(sol.throughput <= best + 3e-2);
}

TEST_CASE("starved nodes carry nothing") {
  const Scenario no_relay = verify::make_two_hop({1, 1}, {0, 0}, {1, 1});
  TwoHopSolution sol = solve_two_hop(no_relay);
  CHECK(sol.throughput == 0.0);
  CHECK(sol.delta.delta.total() == 0.0);
  const Scenario no_dest = verify::make_two_hop({1, 1}, {1, 1}, {0, 0});
  sol = solve_two_hop(no_dest);
  CHECK(sol.throughput == 0.0);
  // Ample destination energy: the relay is limited only by its own transmit
  // energy and the data it holds.
  const Scenario rich = verify::make_two_hop({5, 5}, {1, 1}, {1e6, 1e6});
  const TwoHopSolution in = solve_inner(rich, {PowerPolicy{0.5, 0.5}});
  CHECK(in.relay_rates[0] == doctest::Approx(std::log(1.5)));
  CHECK(in.relay_rates[1] == doctest::Approx(std::log(1.5)));
}

TEST_CASE("source rates never decrease") {
  verify::Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Scenario s =
        random_two_hop(rng, static_cast<std::size_t>(rng.integer(1, 6)));
    const TwoHopSolution sol = solve_inner(s, {random_delta(rng, s)});
    for (std::size_t i = 0; i + 1 < sol.source_rates.size(); ++i) {
      CHECK(sol.source_rates[i + 1] >= sol.source_rates[i] - 1e-12);
    }
  }
}

TEST_CASE("the relay buffer never hurts") {
  // Best policy that forwards each slot's data in the same slot, on a grid.
  verify::Rng rng(12);
  const LinkModel& g = verify::make_two_hop({1}, {1}, {1}).link;
  for (int k = 0; k < 10; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 3));
    const Scenario s = random_two_hop(rng, n, 1.5);
    const std::vector<double> ce = s.profile(Role::Tx).cumulative();
    const std::vector<double> cr = s.profile(Role::Relay).cumulative();
    const std::vector<double> cd = s.profile(Role::Rx).cumulative();
    double best = 0.0;
    auto rec = [&](auto&& self, std::size_t i, double e, double r, double d,
                   double sum) -> void {
      if (i == n) {
        best = std::max(best, sum);
        return;
      }
      for (int j = 0;; ++j) {
        const double rate = j * 1e-2;
        const double f = g.power(rate);
        if (e + f > ce[i] + 1e-12 || r + 2 * f > cr[i] + 1e-12 ||
            d + f > cd[i] + 1e-12) {
          break;
        }
        self(self, i + 1, e + f, r + 2 * f, d + f, sum + rate);
      }
    };
    rec(rec, 0, 0.0, 0.0, 0.0, 0.0);
    CHECK(solve_two_hop(s).throughput >= best - 1e-9);
  }
}

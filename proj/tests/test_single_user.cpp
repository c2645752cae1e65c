#include "doctest.h"

#include <cmath>

#include "ehdc/oracle.hpp"
#include "ehdc/single_user.hpp"
#include "ehdc/verify.hpp"

using namespace ehdc;

namespace {

const LinkModel kNat{RateFunction{}, DecodingFunction::inverse_rate()};

// Plain nested enumeration over a rate grid; a zero rate costs nothing.
double brute_force(const EnergyProfile& tx, const EnergyProfile& rx,
                   const LinkModel& link, double step) {
  const std::size_t n = tx.size();
  const std::vector<double> ce = tx.cumulative(), cr = rx.cumulative();
  double best = 0.0;
  auto rec = [&](auto&& self, std::size_t i, double ue, double ur,
                 double sum) -> void {
    if (i == n) {
      best = std::max(best, sum);
      return;
    }
    self(self, i + 1, ue, ur, sum);
    for (int k = 1;; ++k) {
      const double r = k * step;
      const double e = ue + link.power(r), d = ur + link.decoding_cost(r);
      if (e > ce[i] + 1e-12 || d > cr[i] + 1e-12) break;
      self(self, i + 1, e, d, sum + r);
    }
  };
  rec(rec, 0, 0.0, 0.0, 0.0);
  return best;
}

}  // namespace

TEST_CASE("reference five-slot example") {
  const EnergyProfile tx{2, 2, 1, 2.5, 0.5};
  const EnergyProfile rx{1, 1, 0.5, 2.5, 3};
  const StaircaseSolution sol = solve_single_user(tx, rx, kNat);
  const double expect[] = {0.6061, 0.6061, 0.6061, 1.2528, 1.3863};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(sol.rates[i] == doctest::Approx(expect[i]).epsilon(1e-3));
  }
  CHECK(sol.change_points == std::vector<std::size_t>{3, 4, 5});
  CHECK(sol.binding.back() == Binding::Both);
  CHECK(sol.binding.front() == Binding::RxEnergy);
}

TEST_CASE("transmitter-limited link is plain directional water-filling") {
  const EnergyProfile tx{3, 0, 0};
  const EnergyProfile rx{100, 100, 100};
  const StaircaseSolution sol = solve_single_user(tx, rx, kNat);
  for (double r : sol.rates) CHECK(r == doctest::Approx(std::log(2.0)));
  CHECK(sol.binding.front() == Binding::TxEnergy);
}

TEST_CASE("zero energy gives zero rates") {
  const StaircaseSolution sol =
      solve_single_user(EnergyProfile{0, 0}, EnergyProfile{1, 1}, kNat);
  CHECK(sol.throughput() == 0.0);
  const StaircaseSolution sol2 =
      solve_single_user(EnergyProfile{0, 1}, EnergyProfile{0, 0}, kNat);
  CHECK(sol2.throughput() == 0.0);
}

TEST_CASE("structural rate properties hold on random instances") {
  verify::Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 8));
    const EnergyProfile tx(verify::uniform_vector(rng, n, 0, 3));
    const EnergyProfile rx(verify::uniform_vector(rng, n, 0, 3));
    const StaircaseSolution sol = solve_single_user(tx, rx, kNat);
    const verify::Failure f =
        verify::check_single_user_lemmas(tx, rx, kNat, sol, 1e-6);
    REQUIRE_MESSAGE(!f, *f);
  }
}

TEST_CASE("other decoding costs keep the structure") {
  verify::Rng rng(99);
  const LinkModel links[] = {
      LinkModel(RateFunction{}, DecodingFunction::linear(1.5, 0.0)),
      LinkModel(RateFunction{}, DecodingFunction::linear(0.7, 0.1)),
      LinkModel(RateFunction(LogBase::Base2),
                DecodingFunction::exponential(1.0, 2.0, 0.0)),
  };
  for (const LinkModel& link : links) {
    for (int k = 0; k < 200; ++k) {
      const auto n = static_cast<std::size_t>(rng.integer(1, 6));
      const EnergyProfile tx(verify::uniform_vector(rng, n, 0, 3));
      const EnergyProfile rx(verify::uniform_vector(rng, n, 0, 3));
      const StaircaseSolution sol = solve_single_user(tx, rx, link);
      Scenario s = verify::make_single_user({tx.begin(), tx.end()},
                                            {rx.begin(), rx.end()});
      s.link = link;
      CHECK(oracle::audit(s, {.rates = {sol.rates.begin(), sol.rates.end()}})
                .feasible);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        CHECK(sol.rates[i + 1] >= sol.rates[i] - 1e-9);
      }
    }
  }
}

TEST_CASE("matches exhaustive enumeration") {
  verify::Rng rng(7);
  const double step = 1e-2;
  for (int k = 0; k < 30; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 3));
    const EnergyProfile tx(verify::uniform_vector(rng, n, 0, 2));
    const EnergyProfile rx(verify::uniform_vector(rng, n, 0, 2));
    const double v = solve_single_user(tx, rx, kNat).throughput();
    const double b = brute_force(tx, rx, kNat, step);
    CHECK(v >= b - 1e-9);
    CHECK(v <= b + step * static_cast<double>(n) + 1e-9);
  }
}

TEST_CASE("receiver without a battery") {
  // Each slot decodes only what its own harvest pays for.
  const EnergyProfile tx{3, 0, 0};
  const EnergyProfile rx{0.5, 0.5, 5};
  const RatePolicy r = solve_single_user_no_battery(tx, rx, kNat);
  CHECK(r[0] == doctest::Approx(std::log(1.5)));
  CHECK(r[1] == doctest::Approx(std::log(1.5)));
  CHECK(r[2] == doctest::Approx(std::log(3.0)));

  Scenario s = verify::make_single_user({3, 0, 0}, {0.5, 0.5, 5});
  s.rx_has_battery = false;
  CHECK(oracle::audit(s, {.rates = {r.begin(), r.end()}}).feasible);

  // Never better than a receiver that can store energy.
  verify::Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 6));
    const EnergyProfile a(verify::uniform_vector(rng, n, 0, 3));
    const EnergyProfile b(verify::uniform_vector(rng, n, 0, 3));
    CHECK(solve_single_user_no_battery(a, b, kNat).total() <=
          solve_single_user(a, b, kNat).throughput() + 1e-9);
  }
}

TEST_CASE("mismatched lengths are rejected") {
  CHECK_THROWS_AS(solve_single_user(EnergyProfile{1, 2}, EnergyProfile{1}, kNat),
                  StructuralError);
}

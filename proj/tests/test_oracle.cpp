#include "doctest.h"

#include <cmath>

#include "ehdc/oracle.hpp"
#include "ehdc/verify.hpp"

using namespace ehdc;
using namespace ehdc::oracle;

namespace {

const LinkModel kNat{RateFunction{}, DecodingFunction::inverse_rate()};

// Independent enumeration: every rate vector on the grid, checked prefix by
// prefix.
double enumerate(const EnergyProfile& tx, const EnergyProfile& rx, double step) {
  const std::size_t n = tx.size();
  const std::vector<double> ce = tx.cumulative(), cr = rx.cumulative();
  const int k = static_cast<int>(std::floor(kNat.rate(tx.total()) / step)) + 1;
  std::vector<int> idx(n, 0);
  double best = 0.0;
  for (;;) {
    double e = 0.0, sum = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const double r = idx[i] * step;
      e += kNat.power(r);
      ok = e <= ce[i] + 1e-12 && e <= cr[i] + 1e-12;
      sum += r;
    }
    if (ok) best = std::max(best, sum);
    std::size_t i = 0;
    while (i < n && ++idx[i] > k) idx[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(GridSpec(0.1, 0.05), DomainError);
  CHECK_NOTHROW(GridSpec(0.1, 0.1));
}

TEST_CASE("single-user oracle equals plain enumeration") {
  verify::Rng rng(1);
  for (int k = 0; k < 30; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 3));
    const EnergyProfile tx(verify::uniform_vector(rng, n, 0, 1.5));
    const EnergyProfile rx(verify::uniform_vector(rng, n, 0, 1.5));
    const double step = 2e-2;
    const OracleResult o = oracle_single_user(tx, rx, kNat, {step, 2.0});
    CHECK(o.value == doctest::Approx(enumerate(tx, rx, step)).epsilon(1e-12));
    REQUIRE(o.policies.size() == 1);
    double total = 0.0;
    for (double r : o.policies[0]) total += r;
    CHECK(total == doctest::Approx(o.value));
  }
}

TEST_CASE("oracle policies pass the audit") {
  verify::Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 2));
    const Scenario th = verify::make_two_hop(verify::uniform_vector(rng, n, 0, 1),
                                             verify::uniform_vector(rng, n, 0, 1),
                                             verify::uniform_vector(rng, n, 0, 1));
    const OracleResult o = oracle_weighted(th, {}, {1e-2, 1.0});
    CHECK(audit(th, {.rates = o.policies[0], .relay_rates = o.policies[1]}).feasible);

    const Scenario m = verify::make_mac(verify::uniform_vector(rng, n, 0, 0.3),
                                        verify::uniform_vector(rng, n, 0, 0.3),
                                        verify::uniform_vector(rng, n, 0, 0.3));
    const OracleResult om = oracle_weighted(m, {0.3, 0.7}, {1e-2, 1.0});
    CHECK(audit(m, {.p1 = om.policies[0], .p2 = om.policies[1]}).feasible);

    const Scenario b = verify::make_bc(verify::uniform_vector(rng, n, 0, 0.5),
                                       verify::uniform_vector(rng, n, 0, 0.4),
                                       verify::uniform_vector(rng, n, 0, 0.2), 2);
    const OracleResult ob = oracle_weighted(b, {0.3, 0.7}, {1e-2, 1.0});
    CHECK(audit(b, {.p1 = ob.policies[0], .p2 = ob.policies[1]}).feasible);
  }
}

TEST_CASE("size guard") {
  const EnergyProfile e{1, 1, 1, 1, 1};
  CHECK_THROWS_AS(oracle_single_user(e, e, kNat, {1e-3, 2.0}), OracleRefusal);
  const Scenario m = verify::make_mac({5, 5, 5}, {5, 5, 5}, {5, 5, 5});
  CHECK_THROWS_AS(oracle_weighted(m, {}, {1e-3, 20.0}), OracleRefusal);
}

TEST_CASE("audit reports slacks and the first violation") {
  const Scenario s = verify::make_single_user({1, 1}, {2, 0.5});
  const double r = std::log(2.0);  // costs 1 on both sides
  AuditReport rep = audit(s, {.rates = {r, r}});
  REQUIRE(rep.families.size() == 2);
  CHECK(rep.feasible);
  CHECK(rep.families[0].family == "tx_energy");
  CHECK(rep.families[0].slack[0] == doctest::Approx(0.0));
  CHECK(rep.families[0].slack[1] == doctest::Approx(0.0));
  CHECK(rep.families[1].slack[0] == doctest::Approx(1.0));
  CHECK(rep.families[1].slack[1] == doctest::Approx(0.5));
  CHECK(rep.families[1].argmin == 2);

  rep = audit(s, {.rates = {std::log(3.0), 0.0}});
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violated_family == "tx_energy");
  CHECK(rep.violated_prefix == 1);
}

TEST_CASE("audit covers every topology's families") {
  const Scenario th = verify::make_two_hop({1, 1}, {2, 2}, {2, 2});
  AuditReport rep = audit(th, {.rates = {0.1, 0.1}, .relay_rates = {0.2, 0.0}});
  CHECK(rep.violated_family == "data_causality");
  CHECK(rep.violated_prefix == 1);

  const Scenario m = verify::make_mac({1, 1}, {1, 1}, {1, 1});
  rep = audit(m, {.p1 = {0.6, 0.0}, .p2 = {0.6, 0.0}});
  CHECK(rep.violated_family == "rx_decoding");
  // Decoding user 2 first against user 1's interference is cheaper.
  rep = audit(m, {.p1 = {0.6, 0.0}, .p2 = {0.6, 0.0},
                  .mode = DecodingMode::Successive, .decoded_last = 1});
  CHECK(rep.feasible);

  const Scenario b = verify::make_bc({5, 5}, {5, 5}, {5, 5}, 2);
  rep = audit(b, {.p1 = {1, 1}, .p2 = {2, 0}});
  CHECK(rep.violated_family == "superposition_order");
  rep = audit(b, {.p1 = {4, 1}, .p2 = {2, 0}});
  CHECK(rep.violated_family == "tx_energy");

  CHECK_THROWS_AS(audit(b, {.p1 = {1}, .p2 = {1}}), StructuralError);
}

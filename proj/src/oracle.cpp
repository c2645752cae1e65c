#include "ehdc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ehdc::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxWork = 2e9;

void guard(double work, const char* what) {
  if (work > kMaxWork) {
    std::ostringstream msg;
    msg << what << ": grid too large (" << work << " evaluations)";
    throw OracleRefusal(msg.str());
  }
}

double feas_tol(double total) { return 1e-12 * (1.0 + total); }

// Rate grid with per-index transmit and decoding costs. Rate 0 costs
// nothing on either side.
struct RateTable {
  double step;
  std::size_t k;
  std::vector<double> tx;
  std::vector<double> rx;

  RateTable(const LinkModel& link, const GridSpec& g)
      : step(g.step),
        k(static_cast<std::size_t>(std::floor(std::min(g.bound, kRateCap) /
                                              g.step + 1e-9))) {
    tx.resize(k + 1);
    rx.resize(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      const double r = static_cast<double>(i) * step;
      tx[i] = i == 0 ? 0.0 : link.power(r);
      rx[i] = i == 0 ? 0.0 : link.decoding_cost(r);
    }
  }

  // Largest index whose cost fits in `budget` (tables are increasing);
  // -1 if even index 0 does not fit.
  static long fit(const std::vector<double>& table, double budget) {
    if (budget < 0.0) return -1;
    auto it = std::upper_bound(table.begin(), table.end(), budget);
    return static_cast<long>(it - table.begin()) - 1;
  }
};

double rate_of(long idx, double step) {
  return static_cast<double>(idx) * step;
}

}  // namespace

GridSpec::GridSpec(double s, double b) : step(s), bound(b) {
  if (!(s > 0.0) || !(b >= s)) {
    throw DomainError("grid needs step > 0 and bound >= step");
  }
}

OracleResult oracle_single_user(const EnergyProfile& tx,
                                const EnergyProfile& rx, const LinkModel& link,
                                const GridSpec& grid) {
  const std::size_t n = tx.size();
  if (rx.size() != n) throw StructuralError("profile lengths differ");
  if (n > 4) throw OracleRefusal("single-user oracle handles N <= 4");
  const RateTable t(link, grid);
  guard(std::pow(static_cast<double>(t.k + 1), static_cast<double>(n - 1)),
        "single-user oracle");
  const std::vector<double> ce = tx.cumulative();
  const std::vector<double> cr = rx.cumulative();
  const double te = feas_tol(tx.total());
  const double tr = feas_tol(rx.total());

  std::vector<long> cur(n, 0), best(n, 0);
  long best_sum = -1;
  std::function<void(std::size_t, double, double, long)> rec =
      [&](std::size_t slot, double used_e, double used_r, long sum) {
        const double be = ce[slot] + te - used_e;
        const double br = cr[slot] + tr - used_r;
        const long top = std::min(RateTable::fit(t.tx, be),
                                  RateTable::fit(t.rx, br));
        if (top < 0) return;
        if (slot + 1 == n) {
          if (sum + top > best_sum) {
            best_sum = sum + top;
            cur[slot] = top;
            best = cur;
          }
          return;
        }
        for (long i = 0; i <= top; ++i) {
          cur[slot] = i;
          rec(slot + 1, used_e + t.tx[static_cast<std::size_t>(i)],
              used_r + t.rx[static_cast<std::size_t>(i)], sum + i);
        }
      };
  rec(0, 0.0, 0.0, 0);

  OracleResult out;
  std::vector<double> rates(n);
  for (std::size_t i = 0; i < n; ++i) rates[i] = rate_of(best[i], t.step);
  out.policies.push_back(std::move(rates));
  out.value = rate_of(best_sum, t.step);
  return out;
}

OracleResult oracle_two_hop_inner(const Scenario& s, const PowerPolicy& delta,
                                  const GridSpec& grid) {
  require_valid(s, Topology::TwoHop);
  const std::size_t n = s.slots();
  if (n > 2) throw OracleRefusal("two-hop inner oracle handles N <= 2");
  if (delta.size() != n) throw StructuralError("delta length differs from N");
  const RateTable t(s.link, grid);
  guard(std::pow(static_cast<double>(t.k + 1), 2.0), "two-hop inner oracle");

  const std::vector<double> ce = s.profile(Role::Tx).cumulative();
  const std::vector<double> cd = delta.cumulative();
  const std::vector<double> crel = s.profile(Role::Relay).cumulative();
  const std::vector<double> cdst = s.profile(Role::Rx).cumulative();
  const double tol = feas_tol(ce.back() + crel.back() + cdst.back());
  std::vector<double> cleft(n);
  for (std::size_t i = 0; i < n; ++i) cleft[i] = crel[i] - cd[i];

  // Relay rate index for the given budgets and data on hand.
  auto relay_fit = [&](double left, double dest, long data) {
    return std::min({RateTable::fit(t.tx, left), RateTable::fit(t.rx, dest),
                     data});
  };

  OracleResult out;
  long best_sum = -1;
  std::vector<long> br(n, 0), brt(n, 0);
  const long r1_top = std::min(RateTable::fit(t.tx, ce[0] + tol),
                               RateTable::fit(t.rx, cd[0] + tol));
  for (long i1 = 0; i1 <= r1_top; ++i1) {
    const auto u1 = static_cast<std::size_t>(i1);
    if (n == 1) {
      const long m1 = relay_fit(cleft[0] + tol, cdst[0] + tol, i1);
      if (m1 > best_sum) {
        best_sum = m1;
        br = {i1};
        brt = {m1};
      }
      continue;
    }
    const long m1_top = relay_fit(cleft[0] + tol, cdst[0] + tol, i1);
    // More source data never hurts once delta is fixed.
    const long i2 = std::min(RateTable::fit(t.tx, ce[1] + tol - t.tx[u1]),
                             RateTable::fit(t.rx, cd[1] + tol - t.rx[u1]));
    if (i2 < 0) continue;
    for (long m1 = 0; m1 <= m1_top; ++m1) {
      const auto v1 = static_cast<std::size_t>(m1);
      const long m2 = relay_fit(cleft[1] + tol - t.tx[v1],
                                cdst[1] + tol - t.rx[v1], i1 + i2 - m1);
      if (m2 < 0) continue;
      if (m1 + m2 > best_sum) {
        best_sum = m1 + m2;
        br = {i1, i2};
        brt = {m1, m2};
      }
    }
  }
  std::vector<double> r(n), rt(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = rate_of(br[i], t.step);
    rt[i] = rate_of(brt[i], t.step);
  }
  out.policies = {r, rt};
  out.value = rate_of(std::max(best_sum, 0L), t.step);
  return out;
}

namespace {

OracleResult oracle_two_hop(const Scenario& s, const GridSpec& grid) {
  const std::size_t n = s.slots();
  if (n > 2) throw OracleRefusal("two-hop oracle handles N <= 2");
  const RateTable t(s.link, grid);
  const double k = static_cast<double>(t.k + 1);
  guard(k * k * std::log2(k + 1.0), "two-hop oracle");

  const std::vector<double> ce = s.profile(Role::Tx).cumulative();
  const std::vector<double> crel = s.profile(Role::Relay).cumulative();
  const std::vector<double> cdst = s.profile(Role::Rx).cumulative();
  const double tol = feas_tol(ce.back() + crel.back() + cdst.back());
  auto fit = RateTable::fit;

  long best_sum = -1;
  std::vector<long> br(n, 0), brt(n, 0);
  const long r1_top =
      std::min(fit(t.tx, ce[0] + tol), fit(t.rx, crel[0] + tol));
  for (long i1 = 0; i1 <= r1_top; ++i1) {
    const auto u1 = static_cast<std::size_t>(i1);
    const double relay1 = crel[0] + tol - t.rx[u1];
    const long m1_top = std::min(
        {fit(t.tx, relay1), fit(t.rx, cdst[0] + tol), i1});
    if (n == 1) {
      if (m1_top > best_sum) {
        best_sum = m1_top;
        br = {i1};
        brt = {m1_top};
      }
      continue;
    }
    const long i2_top = fit(t.tx, ce[1] + tol - t.tx[u1]);
    for (long m1 = 0; m1 <= m1_top; ++m1) {
      const auto v1 = static_cast<std::size_t>(m1);
      const double relay = crel[1] + tol - t.rx[u1] - t.tx[v1];
      const long dest = fit(t.rx, cdst[1] + tol - t.rx[v1]);
      // Relay rate in slot 2 when the source sends index j: limited by the
      // relay energy left after decoding j (falls with j) and by the data
      // on hand (grows with j).
      auto energy_cap = [&](long j) {
        return fit(t.tx, relay - t.rx[static_cast<std::size_t>(j)]);
      };
      long j_top = std::min(i2_top, fit(t.rx, relay));
      if (j_top < 0) continue;
      auto h = [&](long j) {
        return std::min({energy_cap(j), dest, i1 + j - m1});
      };
      long lo = 0, hi = j_top;
      while (lo < hi) {
        const long mid = (lo + hi) / 2;
        if (i1 + mid - m1 >= energy_cap(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      for (long j : {lo - 1, lo}) {
        if (j < 0 || j > j_top) continue;
        const long m2 = h(j);
        if (m2 < 0) continue;
        if (m1 + m2 > best_sum) {
          best_sum = m1 + m2;
          br = {i1, j};
          brt = {m1, m2};
        }
      }
    }
  }
  OracleResult out;
  std::vector<double> r(n), rt(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = rate_of(br[i], t.step);
    rt[i] = rate_of(brt[i], t.step);
  }
  out.policies = {r, rt};
  out.value = rate_of(std::max(best_sum, 0L), t.step);
  return out;
}

// Max-plus dynamic program over cumulative grid use (c1, c2). `feasible`
// vets a cumulative state after slot k; `value` scores one slot's (a1, a2).
OracleResult power_dp(std::size_t n, long k1, long k2, double step,
                      const std::function<bool(std::size_t, long, long)>& feasible,
                      const std::function<double(long, long)>& value) {
  const long w = k2 + 1;
  const auto cells = static_cast<std::size_t>((k1 + 1) * w);
  std::vector<double> table(cells);
  for (long a = 0; a <= k1; ++a) {
    for (long b = 0; b <= k2; ++b) {
      table[static_cast<std::size_t>(a * w + b)] = value(a, b);
    }
  }
  std::vector<double> prev(cells, kNegInf), next(cells);
  prev[0] = 0.0;
  std::vector<std::vector<long>> from(n, std::vector<long>(cells, -1));
  for (std::size_t slot = 0; slot < n; ++slot) {
    std::fill(next.begin(), next.end(), kNegInf);
    for (long c1 = 0; c1 <= k1; ++c1) {
      for (long c2 = 0; c2 <= k2; ++c2) {
        if (!feasible(slot, c1, c2)) continue;
        double best = kNegInf;
        long arg = -1;
        for (long b1 = 0; b1 <= c1; ++b1) {
          const double* row = &prev[static_cast<std::size_t>(b1 * w)];
          const double* val =
              &table[static_cast<std::size_t>((c1 - b1) * w + c2)];
          for (long b2 = 0; b2 <= c2; ++b2) {
            const double v = row[b2] + val[-b2];
            if (v > best) {
              best = v;
              arg = b1 * w + b2;
            }
          }
        }
        const auto cell = static_cast<std::size_t>(c1 * w + c2);
        next[cell] = best;
        from[slot][cell] = arg;
      }
    }
    std::swap(prev, next);
  }
  const auto it = std::max_element(prev.begin(), prev.end());
  long cell = static_cast<long>(it - prev.begin());
  OracleResult out;
  out.value = *it;
  std::vector<double> x1(n), x2(n);
  for (std::size_t slot = n; slot-- > 0;) {
    const long p = from[slot][static_cast<std::size_t>(cell)];
    x1[slot] = rate_of(cell / w - p / w, step);
    x2[slot] = rate_of(cell % w - p % w, step);
    cell = p;
  }
  out.policies = {x1, x2};
  return out;
}

long grid_count(double amount, double step) {
  return std::max(0L, static_cast<long>(std::floor(amount / step + 1e-9)));
}

double dp_work(std::size_t n, long k1, long k2) {
  const double cells = static_cast<double>(k1 + 1) * static_cast<double>(k2 + 1);
  return static_cast<double>(n) * cells * cells / 4.0;
}

OracleResult oracle_mac(const Scenario& s, const WeightPair& w,
                        const GridSpec& grid) {
  if (!s.link.decoding_is_inverse_rate()) {
    throw UnsupportedError("MAC oracle needs inverse-rate decoding");
  }
  const std::size_t n = s.slots();
  if (n > 3) throw OracleRefusal("MAC oracle handles N <= 3");
  const std::vector<double> c1 = s.profile(Role::Tx1).cumulative();
  const std::vector<double> c2 = s.profile(Role::Tx2).cumulative();
  const std::vector<double> cr = s.profile(Role::Rx).cumulative();
  const double step = grid.step;
  const long k1 = grid_count(std::min({c1.back(), cr.back(),
                                       grid.bound * static_cast<double>(n)}),
                             step);
  const long k2 = grid_count(std::min({c2.back(), cr.back(),
                                       grid.bound * static_cast<double>(n)}),
                             step);
  guard(dp_work(n, k1, k2), "MAC oracle");
  const double tol = feas_tol(c1.back() + c2.back() + cr.back());
  const auto& g = s.link;
  return power_dp(
      n, k1, k2, step,
      [&](std::size_t k, long a, long b) {
        const double p1 = rate_of(a, step), p2 = rate_of(b, step);
        return p1 <= c1[k] + tol && p2 <= c2[k] + tol &&
               rate_of(a + b, step) <= cr[k] + tol;
      },
      [&](long a, long b) {
        const double p1 = rate_of(a, step), p2 = rate_of(b, step);
        if (p1 > grid.bound || p2 > grid.bound) return kNegInf;
        const double sum = g.rate(p1 + p2);
        // Best corner of the joint-decoding pentagon for these weights.
        return w.mu1 >= w.mu2
                   ? w.mu1 * g.rate(p1) + w.mu2 * (sum - g.rate(p1))
                   : w.mu2 * g.rate(p2) + w.mu1 * (sum - g.rate(p2));
      });
}

OracleResult oracle_bc(const Scenario& s, const WeightPair& w,
                       const GridSpec& grid) {
  if (!s.link.decoding_is_inverse_rate()) {
    throw UnsupportedError("BC oracle needs inverse-rate decoding");
  }
  if (!(s.bc_noise_sigma2 > 1.0)) throw DomainError("sigma2 must exceed 1");
  const std::size_t n = s.slots();
  if (n > 3) throw OracleRefusal("BC oracle handles N <= 3");
  const std::vector<double> ce = s.profile(Role::Tx).cumulative();
  const std::vector<double> c1 = s.profile(Role::Rx1).cumulative();
  const std::vector<double> c2 = s.profile(Role::Rx2).cumulative();
  const double sig = s.bc_noise_sigma2;
  const double step = grid.step;
  const double cap = grid.bound * static_cast<double>(n);
  const long kt = grid_count(std::min({ce.back(), c1.back(), cap}), step);
  const long k2 = grid_count(
      std::min({c2.back(), c1.back(), ce.back() / sig, cap}), step);
  guard(dp_work(n, kt, k2), "BC oracle");
  const double tol = feas_tol(ce.back() + c1.back() + c2.back());
  const auto& g = s.link;
  return power_dp(
      n, kt, k2, step,
      [&](std::size_t k, long a, long b) {
        const double pt = rate_of(a, step), p2 = rate_of(b, step);
        return (sig - 1.0) * p2 + pt <= ce[k] + tol && pt <= c1[k] + tol &&
               p2 <= c2[k] + tol;
      },
      [&](long a, long b) {
        if (a < b) return kNegInf;
        const double pt = rate_of(a, step), p2 = rate_of(b, step);
        if (pt > grid.bound) return kNegInf;
        const double r2 = g.rate(p2);
        return w.mu1 * (g.rate(pt) - r2) + w.mu2 * r2;
      });
}

}  // namespace

OracleResult oracle_weighted(const Scenario& s, const WeightPair& w,
                             const GridSpec& grid) {
  require_valid(s, s.topology);
  switch (s.topology) {
    case Topology::SingleUser:
      return oracle_single_user(s.profile(Role::Tx), s.profile(Role::Rx),
                                s.link, grid);
    case Topology::TwoHop:
      return oracle_two_hop(s, grid);
    case Topology::Mac:
      return oracle_mac(s, w, grid);
    case Topology::Bc:
      return oracle_bc(s, w, grid);
  }
  throw StructuralError("unknown topology");
}

namespace {

ConstraintSlack family(std::string name, std::span<const double> budget,
                       std::span<const double> use) {
  ConstraintSlack c;
  c.family = std::move(name);
  const std::vector<double> b = prefix_sums(budget);
  const std::vector<double> u = prefix_sums(use);
  c.slack.resize(b.size());
  c.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < b.size(); ++k) {
    c.slack[k] = b[k] - u[k];
    if (c.slack[k] < c.min_slack) {
      c.min_slack = c.slack[k];
      c.argmin = k + 1;
    }
  }
  return c;
}

std::vector<double> map(std::span<const double> v,
                        const std::function<double(double)>& f) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
  return out;
}

void need_length(const std::vector<double>& v, std::size_t n,
                 const char* name) {
  if (v.size() != n) {
    throw StructuralError(std::string("policy '") + name +
                          "' has the wrong length");
  }
}

}  // namespace

AuditReport audit(const Scenario& s, const Policies& p, double tol) {
  require_valid(s, s.topology);
  const std::size_t n = s.slots();
  const LinkModel& link = s.link;
  auto power = [&](double r) { return r > 0.0 ? link.power(r) : 0.0; };
  auto decode = [&](double r) { return r > 0.0 ? link.decoding_cost(r) : 0.0; };
  AuditReport rep;
  switch (s.topology) {
    case Topology::SingleUser: {
      need_length(p.rates, n, "rates");
      rep.families.push_back(family("tx_energy", s.profile(Role::Tx).values(),
                                    map(p.rates, power)));
      if (s.rx_has_battery) {
        rep.families.push_back(family("rx_decoding",
                                      s.profile(Role::Rx).values(),
                                      map(p.rates, decode)));
      } else {
        // Every slot decodes from its own harvest: prefix k covers slot k.
        ConstraintSlack c;
        c.family = "rx_decoding_per_slot";
        c.min_slack = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          c.slack.push_back(s.profile(Role::Rx)[i] - decode(p.rates[i]));
          if (c.slack.back() < c.min_slack) {
            c.min_slack = c.slack.back();
            c.argmin = i + 1;
          }
        }
        rep.families.push_back(std::move(c));
      }
      break;
    }
    case Topology::TwoHop: {
      need_length(p.rates, n, "source_rates");
      need_length(p.relay_rates, n, "relay_rates");
      std::vector<double> relay_use(n);
      for (std::size_t i = 0; i < n; ++i) {
        relay_use[i] = decode(p.rates[i]) + power(p.relay_rates[i]);
      }
      rep.families.push_back(family("source_energy",
                                    s.profile(Role::Tx).values(),
                                    map(p.rates, power)));
      rep.families.push_back(
          family("relay_energy", s.profile(Role::Relay).values(), relay_use));
      rep.families.push_back(family("destination_decoding",
                                    s.profile(Role::Rx).values(),
                                    map(p.relay_rates, decode)));
      rep.families.push_back(family("data_causality", p.rates, p.relay_rates));
      break;
    }
    case Topology::Mac: {
      need_length(p.p1, n, "p1");
      need_length(p.p2, n, "p2");
      std::vector<double> rx(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (p.mode == DecodingMode::Simultaneous) {
          rx[i] = p.p1[i] + p.p2[i];
        } else if (p.decoded_last == 1) {
          rx[i] = p.p1[i] + p.p2[i] / (1.0 + p.p1[i]);
        } else {
          rx[i] = p.p2[i] + p.p1[i] / (1.0 + p.p2[i]);
        }
      }
      rep.families.push_back(
          family("tx1_energy", s.profile(Role::Tx1).values(), p.p1));
      rep.families.push_back(
          family("tx2_energy", s.profile(Role::Tx2).values(), p.p2));
      rep.families.push_back(
          family("rx_decoding", s.profile(Role::Rx).values(), rx));
      break;
    }
    case Topology::Bc: {
      need_length(p.p1, n, "p_t");
      need_length(p.p2, n, "p_2");
      std::vector<double> tx(n), order(n);
      for (std::size_t i = 0; i < n; ++i) {
        tx[i] = (s.bc_noise_sigma2 - 1.0) * p.p2[i] + p.p1[i];
      }
      rep.families.push_back(family("tx_energy", s.profile(Role::Tx).values(), tx));
      rep.families.push_back(
          family("rx1_decoding", s.profile(Role::Rx1).values(), p.p1));
      rep.families.push_back(
          family("rx2_decoding", s.profile(Role::Rx2).values(), p.p2));
      // p_t >= p_2 slot by slot, reported as a per-slot slack.
      ConstraintSlack c;
      c.family = "superposition_order";
      c.min_slack = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        c.slack.push_back(p.p1[i] - p.p2[i]);
        if (c.slack.back() < c.min_slack) {
          c.min_slack = c.slack.back();
          c.argmin = i + 1;
        }
      }
      rep.families.push_back(std::move(c));
      break;
    }
  }
  for (const ConstraintSlack& c : rep.families) {
    if (c.min_slack < -tol) {
      rep.feasible = false;
      if (rep.violated_prefix == 0) {
        rep.violated_family = c.family;
        for (std::size_t k = 0; k < c.slack.size(); ++k) {
          if (c.slack[k] < -tol) {
            rep.violated_prefix = k + 1;
            break;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace ehdc::oracle

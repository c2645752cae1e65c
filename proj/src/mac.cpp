#include "ehdc/mac.hpp"

#include <algorithm>
#include <cmath>

#include "ehdc/gp.hpp"
#include "ehdc/waterfill.hpp"

namespace ehdc {

namespace {

void require_mac(const Scenario& s) {
  require_valid(s, Topology::Mac);
  if (!s.link.decoding_is_inverse_rate()) {
    throw UnsupportedError(
        "MAC solvers need a decoding cost equal to the inverse rate map");
  }
}

Scenario swapped(const Scenario& s) {
  Scenario out = s;
  out.energy.erase(Role::Tx1);
  out.energy.erase(Role::Tx2);
  out.energy.emplace(Role::Tx1, s.profile(Role::Tx2));
  out.energy.emplace(Role::Tx2, s.profile(Role::Tx1));
  return out;
}

RegionPoint unswap(RegionPoint p, const WeightPair& original) {
  std::swap(p.b1, p.b2);
  std::swap(p.first, p.second);
  p.weights = original;
  return p;
}

std::vector<double> pointwise_min(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
  return out;
}

double scale_of(const Scenario& s) {
  double m = 1.0;
  for (const auto& [role, e] : s.energy) m = std::max(m, e.total());
  return m;
}

// Energy user 1 may use: its own harvest and the receiver's.
EnergyProfile user1_budget(const Scenario& s) {
  return effective_profile(pointwise_min(s.profile(Role::Tx1).cumulative(),
                                         s.profile(Role::Rx).cumulative()),
                           1e-9 * scale_of(s));
}

double total_rate(const LinkModel& link, std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += link.rate(v);
  return s;
}

// B2 as sum of g(p2 / (1 + p1)), i.e. the rate left after user 1.
double residual_rate(const LinkModel& link, std::span<const double> p1,
                     std::span<const double> p2) {
  double s = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    s += link.rate(p2[i] / (1.0 + p1[i]));
  }
  return s;
}

RegionPoint single_user1(const Scenario& s, const WeightPair& w) {
  const EnergyProfile budget = user1_budget(s);
  const PowerPolicy p1 = waterfill::directional_waterfill(
      std::vector<waterfill::Bin>(budget.size()), budget);
  RegionPoint pt;
  pt.weights = w;
  pt.b1 = total_rate(s.link, p1.values());
  pt.first = p1;
  pt.second = PowerPolicy(std::vector<double>(p1.size(), 0.0));
  return pt;
}

}  // namespace

std::pair<double, PowerPolicy> mac_inner(const Scenario& s,
                                         std::span<const double> p1) {
  const std::vector<double> e2 = s.profile(Role::Tx2).cumulative();
  const std::vector<double> rx = s.profile(Role::Rx).cumulative();
  if (p1.size() != e2.size()) throw StructuralError("p1 length differs from N");
  std::vector<double> m(e2.size());
  std::vector<waterfill::Bin> bins(e2.size());
  double used = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    used += p1[i];
    m[i] = std::min(e2[i], rx[i] - used);
    bins[i].floor = 1.0 + p1[i];
  }
  const PowerPolicy p2 = waterfill::directional_waterfill(
      bins, effective_profile(m, 1e-9 * scale_of(s)));
  double value = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    value += s.link.rate(p1[i] + p2[i]);
  }
  return {value, p2};
}

RegionPoint solve_mac_simultaneous(const Scenario& s, const WeightPair& w,
                                   double tol) {
  require_mac(s);
  if (w.mu2 == 0.0) return single_user1(s, w);
  if (w.mu1 < w.mu2) {
    return unswap(solve_mac_simultaneous(swapped(s), {w.mu2, w.mu1}, tol), w);
  }
  // Equal weights only care about the sum; a large mu keeps that dominant
  // while breaking ties toward the largest B1.
  const double mu = w.mu1 == w.mu2 ? 1e4 : w.mu2 / (w.mu1 - w.mu2);
  waterfill::OuterProblem problem{
      [&](std::span<const double> p1) {
        return mu * mac_inner(s, p1).first + total_rate(s.link, p1);
      },
      user1_budget(s), true, false};
  const waterfill::OuterResult res =
      waterfill::outer_waterflow(problem, {tol / (1.0 + mu), 10'000});

  RegionPoint pt;
  pt.weights = w;
  pt.first = PowerPolicy(res.allocation);
  pt.second = mac_inner(s, res.allocation).second;
  pt.b1 = total_rate(s.link, pt.first.values());
  pt.b2 = residual_rate(s.link, pt.first.values(), pt.second.values());
  pt.converged = res.converged;
  pt.iterations = res.iterations;
  return pt;
}

namespace {

constexpr double kZeroBudget = 1e-12;
constexpr double kLogFloor = -40.0;

struct ScaLayout {
  std::size_t n = 0;
  std::vector<bool> free1, free2;
  std::vector<long> x1, x2, t1, t2;
  std::size_t vars = 0;
};

ScaLayout make_layout(const std::vector<double>& c1,
                      const std::vector<double>& c2,
                      const std::vector<double>& cr) {
  ScaLayout l;
  l.n = c1.size();
  l.free1.resize(l.n);
  l.free2.resize(l.n);
  l.x1.assign(l.n, -1);
  l.x2.assign(l.n, -1);
  l.t1.assign(l.n, -1);
  l.t2.assign(l.n, -1);
  for (std::size_t i = 0; i < l.n; ++i) {
    l.free1[i] = c1[i] > kZeroBudget && cr[i] > kZeroBudget;
    l.free2[i] = c2[i] > kZeroBudget && cr[i] > kZeroBudget;
    if (l.free1[i]) {
      l.x1[i] = static_cast<long>(l.vars++);
      l.t1[i] = static_cast<long>(l.vars++);
    }
    if (l.free2[i]) {
      l.x2[i] = static_cast<long>(l.vars++);
      l.t2[i] = static_cast<long>(l.vars++);
    }
  }
  return l;
}

gp::Monomial mono(double c, std::initializer_list<std::pair<long, double>> e) {
  gp::Monomial m;
  m.coefficient = c;
  for (auto [v, p] : e) m.exponents[static_cast<std::size_t>(v)] += p;
  return m;
}

// t <= u(x; alpha), with u the AM-GM monomial under-estimate of 1 + x.
gp::Posynomial amgm_cap(long t, long x, double prev) {
  const double a = 1.0 / (1.0 + std::max(prev, 1e-9));
  const double c = std::pow(a, a) * std::pow(1.0 - a, 1.0 - a);
  return {{mono(c, {{t, 1.0}, {x, -(1.0 - a)}})}};
}

gp::GeometricProgram build_gp(const ScaLayout& l, const WeightPair& w,
                              const std::vector<double>& c1,
                              const std::vector<double>& c2,
                              const std::vector<double>& cr,
                              const std::vector<double>& x1,
                              const std::vector<double>& x2) {
  gp::GeometricProgram prog;
  prog.variables = l.vars;
  gp::Monomial obj;
  for (std::size_t i = 0; i < l.n; ++i) {
    if (l.free1[i]) obj.exponents[static_cast<std::size_t>(l.t1[i])] = -w.mu1;
    if (l.free2[i]) obj.exponents[static_cast<std::size_t>(l.t2[i])] = -w.mu2;
  }
  prog.objective.terms.push_back(obj);

  for (std::size_t k = 0; k < l.n; ++k) {
    gp::Posynomial tx1, tx2, rx;
    for (std::size_t i = 0; i <= k; ++i) {
      if (l.free1[i]) {
        tx1.terms.push_back(mono(1.0 / c1[k], {{l.x1[i], 1.0}}));
        rx.terms.push_back(mono(1.0 / cr[k], {{l.x1[i], 1.0}}));
      }
      if (l.free2[i]) {
        tx2.terms.push_back(mono(1.0 / c2[k], {{l.x2[i], 1.0}}));
        if (l.free1[i]) {
          tx2.terms.push_back(
              mono(1.0 / c2[k], {{l.x2[i], 1.0}, {l.x1[i], 1.0}}));
        }
        rx.terms.push_back(mono(1.0 / cr[k], {{l.x2[i], 1.0}}));
      }
    }
    for (auto* p : {&tx1, &tx2, &rx}) {
      if (!p->terms.empty()) prog.constraints.push_back(std::move(*p));
    }
  }
  const double floor = std::exp(kLogFloor);
  for (std::size_t i = 0; i < l.n; ++i) {
    if (l.free1[i]) {
      prog.constraints.push_back(amgm_cap(l.t1[i], l.x1[i], x1[i]));
      prog.constraints.push_back({{mono(floor, {{l.x1[i], -1.0}})}});
    }
    if (l.free2[i]) {
      prog.constraints.push_back(amgm_cap(l.t2[i], l.x2[i], x2[i]));
      prog.constraints.push_back({{mono(floor, {{l.x2[i], -1.0}})}});
    }
  }
  return prog;
}

bool successive_feasible(const std::vector<double>& c1,
                         const std::vector<double>& c2,
                         const std::vector<double>& cr,
                         const std::vector<double>& x1,
                         const std::vector<double>& x2, double tol) {
  double s1 = 0.0, s2 = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    s1 += x1[i];
    s2 += (1.0 + x1[i]) * x2[i];
    sr += x1[i] + x2[i];
    if (s1 > c1[i] + tol || s2 > c2[i] + tol || sr > cr[i] + tol) return false;
  }
  return true;
}

}  // namespace

RegionPoint solve_mac_successive(
    const Scenario& s, const WeightPair& w,
    const std::optional<std::pair<PowerPolicy, PowerPolicy>>& init,
    const ScaOptions& options) {
  require_mac(s);
  if (w.mu2 == 0.0) return single_user1(s, w);
  if (w.mu1 < w.mu2) {
    std::optional<std::pair<PowerPolicy, PowerPolicy>> flipped;
    if (init) flipped.emplace(init->second, init->first);
    return unswap(
        solve_mac_successive(swapped(s), {w.mu2, w.mu1}, flipped, options), w);
  }

  const std::vector<double> c1 = s.profile(Role::Tx1).cumulative();
  const std::vector<double> c2 = s.profile(Role::Tx2).cumulative();
  const std::vector<double> cr = s.profile(Role::Rx).cumulative();
  const std::size_t n = c1.size();

  std::vector<double> x1(n), x2(n);
  {
    const auto [p1, p2] = init ? *init : [&] {
      const RegionPoint sim = solve_mac_simultaneous(s, w);
      return std::pair{sim.first, sim.second};
    }();
    if (p1.size() != n || p2.size() != n) {
      throw StructuralError("initial powers have the wrong length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      x1[i] = p1[i];
      x2[i] = p2[i] / (1.0 + p1[i]);
    }
  }
  const double ftol = kFeasibilityTol * scale_of(s);
  if (!successive_feasible(c1, c2, cr, x1, x2, ftol)) {
    throw InfeasibleError("initial point violates the successive constraints");
  }

  auto value_of = [&](const std::vector<double>& a,
                      const std::vector<double>& b) {
    return w.mu1 * total_rate(s.link, a) + w.mu2 * total_rate(s.link, b);
  };

  RegionPoint pt;
  pt.weights = w;
  pt.converged = false;
  double value = value_of(x1, x2);
  pt.trace.push_back({x1, x2, value});

  const ScaLayout layout = make_layout(c1, c2, cr);
  if (layout.vars == 0) pt.converged = true;
  while (!pt.converged && pt.iterations < options.max_iters) {
    ++pt.iterations;
    const gp::GeometricProgram prog = build_gp(layout, w, c1, c2, cr, x1, x2);
    const gp::GpResult r = gp::solve_gp(prog);
    std::vector<double> n1(n, 0.0), n2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (layout.free1[i]) n1[i] = r.x[static_cast<std::size_t>(layout.x1[i])];
      if (layout.free2[i]) n2[i] = r.x[static_cast<std::size_t>(layout.x2[i])];
    }
    const double next = value_of(n1, n2);
    if (!(next >= value) || !successive_feasible(c1, c2, cr, n1, n2, ftol)) {
      // The GP is solved to tolerance; a step that does not improve means
      // the iteration has settled.
      pt.converged = true;
      break;
    }
    const double change = next - value;
    x1 = std::move(n1);
    x2 = std::move(n2);
    value = next;
    pt.trace.push_back({x1, x2, value});
    if (change <= options.tol * std::max(1.0, std::abs(value))) {
      pt.converged = true;
    }
  }

  std::vector<double> p2(n);
  for (std::size_t i = 0; i < n; ++i) p2[i] = (1.0 + x1[i]) * x2[i];
  pt.first = PowerPolicy(x1);
  pt.second = PowerPolicy(std::move(p2));
  pt.b1 = total_rate(s.link, x1);
  pt.b2 = total_rate(s.link, x2);
  return pt;
}

DepartureRegion sweep_region(const Scenario& s, DecodingMode mode,
                             int n_weights, double tol,
                             const ScaOptions& sca) {
  DepartureRegion region;
  region.mode = mode;
  for (const WeightPair& w : weight_grid(n_weights)) {
    RegionPoint sim = solve_mac_simultaneous(s, w, tol);
    if (mode == DecodingMode::Simultaneous) {
      region.points.push_back(std::move(sim));
      continue;
    }
    RegionPoint suc = solve_mac_successive(
        s, w, std::pair{sim.first, sim.second}, sca);
    suc.converged = suc.converged && sim.converged;
    region.points.push_back(std::move(suc));
  }
  return region;
}

}  // namespace ehdc

#include "ehdc/bc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehdc/waterfill.hpp"

namespace ehdc {

namespace {

void require_bc(const Scenario& s) {
  if (!(s.bc_noise_sigma2 > 1.0)) {
    throw DomainError("bc_noise_sigma2 must exceed 1");
  }
  require_valid(s, Topology::Bc);
  if (!s.link.decoding_is_inverse_rate()) {
    throw UnsupportedError(
        "BC solver needs a decoding cost equal to the inverse rate map");
  }
}

double scale_of(const Scenario& s) {
  double m = 1.0;
  for (const auto& [role, e] : s.energy) m = std::max(m, e.total());
  return m;
}

std::vector<double> min3(const std::vector<double>& a,
                         const std::vector<double>& b,
                         const std::vector<double>& c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::min({a[i], b[i], c[i]});
  }
  return out;
}

RegionPoint finish(const Scenario& s, const WeightPair& w, PowerPolicy pt,
                   PowerPolicy p2) {
  RegionPoint pt_out;
  pt_out.weights = w;
  for (std::size_t i = 0; i < pt.size(); ++i) {
    const double r2 = s.link.rate(p2[i]);
    double r1 = s.link.rate(pt[i]) - r2;
    if (r1 < 0.0 && r1 >= -1e-9) r1 = 0.0;
    pt_out.b1 += r1;
    pt_out.b2 += r2;
  }
  pt_out.first = std::move(pt);
  pt_out.second = std::move(p2);
  return pt_out;
}

}  // namespace

double bc_min_power(double r1, double r2, double sigma2, LogBase base) {
  if (!(sigma2 > 1.0)) throw DomainError("sigma2 must exceed 1");
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) {
    throw DomainError("rates must be non-negative");
  }
  const RateFunction g(base);
  return (sigma2 - 1.0) * g.power(r2) + g.power(r1 + r2);
}

std::pair<double, PowerPolicy> bc_inner(const Scenario& s,
                                        std::span<const double> p2) {
  const std::vector<double> e = s.profile(Role::Tx).cumulative();
  const std::vector<double> e1 = s.profile(Role::Rx1).cumulative();
  if (p2.size() != e.size()) throw StructuralError("p2 length differs from N");
  std::vector<double> b(e.size());
  std::vector<waterfill::Bin> bins(e.size());
  double weak = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    weak += p2[i];
    b[i] = std::min(e1[i], e[i] - (s.bc_noise_sigma2 - 1.0) * weak);
    bins[i].min_power = p2[i];
  }
  const PowerPolicy pt = waterfill::min_power_backward_fill(
      bins, effective_profile(b, 1e-9 * scale_of(s)));
  double value = 0.0;
  for (double v : pt) value += s.link.rate(v);
  return {value, pt};
}

RegionPoint solve_bc(const Scenario& s, const WeightPair& w, double tol) {
  require_bc(s);
  const std::vector<double> e = s.profile(Role::Tx).cumulative();
  const std::vector<double> e1 = s.profile(Role::Rx1).cumulative();
  const std::size_t n = e.size();

  if (w.mu1 >= w.mu2) {
    // All power to the strong user.
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = std::min(e[i], e1[i]);
    const PowerPolicy pt = waterfill::directional_waterfill(
        std::vector<waterfill::Bin>(n), effective_profile(l));
    return finish(s, w, pt, PowerPolicy(std::vector<double>(n, 0.0)));
  }

  const std::vector<double> e2 = s.profile(Role::Rx2).cumulative();
  std::vector<double> scaled_e(n);
  for (std::size_t i = 0; i < n; ++i) scaled_e[i] = e[i] / s.bc_noise_sigma2;
  const EnergyProfile k_budget =
      effective_profile(min3(e2, e1, scaled_e), 1e-9 * scale_of(s));

  const double mu = w.mu1 / (w.mu2 - w.mu1);
  waterfill::OuterProblem problem{
      [&](std::span<const double> p2) {
        double weak = 0.0;
        for (double v : p2) weak += s.link.rate(v);
        try {
          return mu * bc_inner(s, p2).first + weak;
        } catch (const InfeasibleError&) {
          return -std::numeric_limits<double>::infinity();
        }
      },
      k_budget, true, true};
  const waterfill::OuterResult res =
      waterfill::outer_waterflow(problem, {tol / (1.0 + mu), 10'000});

  PowerPolicy p2(res.allocation);
  PowerPolicy pt = bc_inner(s, res.allocation).second;
  RegionPoint out = finish(s, w, std::move(pt), std::move(p2));
  out.converged = res.converged;
  out.iterations = res.iterations;
  return out;
}

DepartureRegion sweep_bc_region(const Scenario& s, int n_weights, double tol) {
  DepartureRegion region;
  for (const WeightPair& w : weight_grid(n_weights)) {
    region.points.push_back(solve_bc(s, w, tol));
  }
  return region;
}

}  // namespace ehdc

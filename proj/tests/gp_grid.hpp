#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "ehdc/gp.hpp"
#include "ehdc/verify.hpp"

namespace gp_grid {

using namespace ehdc::gp;

inline Monomial mono(double c, std::map<std::size_t, double> e) { return {c, std::move(e)}; }

// Best feasible objective over a log-domain grid centred at `centre` with the
// given half-width and step; +inf when no grid point is feasible.
inline double grid_search(const GeometricProgram& p, const std::vector<double>& centre,
                   double half, double step, std::vector<double>* arg) {
  const std::size_t n = p.variables;
  const int k = static_cast<int>(std::lround(half / step));
  std::vector<int> idx(n, -k);
  std::vector<double> x(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(centre[i] + idx[i] * step);
    bool ok = true;
    for (const Posynomial& c : p.constraints) {
      if (evaluate(c, x) > 1.0) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const double v = evaluate(p.objective, x);
      if (v < best) {
        best = v;
        if (arg) {
          for (std::size_t i = 0; i < n; ++i) (*arg)[i] = centre[i] + idx[i] * step;
        }
      }
    }
    std::size_t i = 0;
    while (i < n && ++idx[i] > k) idx[i++] = -k;
    if (i == n) break;
  }
  return best;
}

// Full 1e-2 grid over [-3, 3]^n for n <= 2. Larger n starts coarse and
// refines around the winner, each pass spanning two steps of the last.
inline double log_grid_oracle(const GeometricProgram& p) {
  const std::size_t n = p.variables;
  const std::vector<double> origin(n, 0.0);
  std::vector<double> arg(n, 0.0);
  if (n <= 2) return grid_search(p, origin, 3.0, 1e-2, nullptr);
  double best = grid_search(p, origin, 3.0, 0.2, &arg);
  best = std::min(best, grid_search(p, std::vector<double>(arg), 0.4, 0.05, &arg));
  best = std::min(best, grid_search(p, std::vector<double>(arg), 0.1, 1e-2, &arg));
  return best;
}

inline Monomial random_monomial(ehdc::verify::Rng& rng, std::size_t n) {
  Monomial m;
  m.coefficient = rng.uniform(0.2, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform(0, 1) < 0.7) m.exponents[i] = rng.uniform(-2.0, 2.0);
  }
  return m;
}

// Objective grows in every direction of log space; constraints hold with room
// at x = 1.
inline GeometricProgram random_program(ehdc::verify::Rng& rng) {
  GeometricProgram p;
  p.variables = static_cast<std::size_t>(rng.integer(1, 4));
  const int terms = rng.integer(1, 5);
  for (std::size_t i = 0; i < p.variables; ++i) {
    p.objective.terms.push_back(mono(rng.uniform(0.2, 1.0), {{i, 1.0}}));
    p.objective.terms.push_back(mono(rng.uniform(0.2, 1.0), {{i, -1.0}}));
  }
  for (int t = 0; t < terms; ++t) {
    p.objective.terms.push_back(random_monomial(rng, p.variables));
  }
  const int ncons = rng.integer(0, 2);
  for (int j = 0; j < ncons; ++j) {
    Posynomial c;
    const int ct = rng.integer(1, 3);
    double sum = 0.0;
    for (int t = 0; t < ct; ++t) {
      c.terms.push_back(random_monomial(rng, p.variables));
      sum += c.terms.back().coefficient;
    }
    const double scale = rng.uniform(0.3, 0.9) / sum;
    for (Monomial& m : c.terms) m.coefficient *= scale;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

}  // namespace gp_grid

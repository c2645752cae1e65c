#pragma once

#include <map>
#include <optional>
#include <vector>

namespace ehdc::gp {

/// coefficient * prod_k x_k^{exponents[k]}, coefficient > 0.
struct Monomial {
  double coefficient = 1.0;
  std::map<std::size_t, double> exponents;
};

/// Sum of monomials; at least one term.
struct Posynomial {
  std::vector<Monomial> terms;
};

/// minimize objective(x) s.t. constraints_j(x) <= 1, x > 0.
struct GeometricProgram {
  std::size_t variables = 0;
  Posynomial objective;
  std::vector<Posynomial> constraints;
};

struct GpOptions {
  double tol = 1e-9;
  int max_newton_per_stage = 50;
  int max_stages = 30;
};

struct GpResult {
  std::vector<double> x;
  double objective = 0.0;
  bool converged = false;
  /// Barrier duality-gap bound m/t after each stage.
  std::vector<double> gap_history;
};

/// Evaluates a posynomial at x.
double evaluate(const Posynomial& p, const std::vector<double>& x);

/// Interior-point solve in log variables. `start`, when given, must be
/// strictly feasible; otherwise a phase-one problem finds an interior point.
/// InfeasibleError when no interior point exists; StructuralError on a
/// malformed program.
GpResult solve_gp(const GeometricProgram& prog, const GpOptions& options = {},
                  const std::optional<std::vector<double>>& start = {});

}  // namespace ehdc::gp

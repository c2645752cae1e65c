#include "doctest.h"

#include <cmath>
#include <limits>

#include "ehdc/errors.hpp"
#include "ehdc/gp.hpp"
#include "ehdc/verify.hpp"
#include "gp_grid.hpp"

using namespace ehdc;
using namespace ehdc::gp;
using gp_grid::log_grid_oracle;
using gp_grid::mono;
using gp_grid::random_program;

TEST_CASE("x + 1/x") {
  GeometricProgram p;
  p.variables = 1;
  p.objective.terms = {mono(1, {{0, 1}}), mono(1, {{0, -1}})};
  const GpResult r = solve_gp(p);
  CHECK(r.converged);
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("largest product under a linear budget") {
  GeometricProgram p;
  p.variables = 2;
  p.objective.terms = {mono(1, {{0, -1}, {1, -1}})};
  p.constraints = {{{mono(0.5, {{0, 1}}), mono(0.5, {{1, 1}})}}};
  const GpResult r = solve_gp(p);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("bounds meet at a corner") {
  GeometricProgram p;
  p.variables = 2;
  p.objective.terms = {mono(1, {{0, 1}, {1, -1}})};
  p.constraints = {{{mono(2, {{0, -1}})}}, {{mono(1.0 / 3.0, {{1, 1}})}}};
  const GpResult r = solve_gp(p);
  CHECK(r.objective == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("box of largest volume for a given surface") {
  GeometricProgram p;
  p.variables = 3;
  p.objective.terms = {mono(1, {{0, -1}, {1, -1}, {2, -1}})};
  const double area = 24.0;  // side 2
  p.constraints = {{{mono(2 / area, {{0, 1}, {1, 1}}), mono(2 / area, {{0, 1}, {2, 1}}),
                     mono(2 / area, {{1, 1}, {2, 1}})}}};
  const GpResult r = solve_gp(p);
  CHECK(r.objective == doctest::Approx(1.0 / 8.0).epsilon(1e-6));
  for (double x : r.x) CHECK(x == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("warm start from a strictly feasible point") {
  GeometricProgram p;
  p.variables = 2;
  p.objective.terms = {mono(1, {{0, -1}, {1, -1}})};
  p.constraints = {{{mono(0.5, {{0, 1}}), mono(0.5, {{1, 1}})}}};
  const GpResult r = solve_gp(p, {}, std::vector<double>{0.5, 0.5});
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(solve_gp(p, {}, std::vector<double>{2.0, 2.0}));
}

TEST_CASE("infeasible and malformed programs") {
  GeometricProgram p;
  p.variables = 1;
  p.objective.terms = {mono(1, {{0, 1}})};
  p.constraints = {{{mono(1, {{0, 1}})}}, {{mono(2, {{0, -1}})}}};
  CHECK_THROWS_AS(solve_gp(p), InfeasibleError);

  GeometricProgram bad;
  bad.variables = 1;
  bad.objective.terms = {mono(-1, {{0, 1}})};
  CHECK_THROWS_AS(solve_gp(bad), StructuralError);
  bad.objective.terms = {mono(1, {{3, 1}})};
  CHECK_THROWS_AS(solve_gp(bad), StructuralError);
}

TEST_CASE("random programs agree with a log-grid search") {
  verify::Rng rng(441);
  int compared = 0;
  for (int k = 0; k < 100; ++k) {
    const GeometricProgram p = random_program(rng);
    const GpResult r = solve_gp(p);
    CHECK(r.converged);
    for (double x : r.x) CHECK(x > 0.0);
    for (std::size_t j = 1; j < r.gap_history.size(); ++j) {
      CHECK(r.gap_history[j] < r.gap_history[j - 1]);
    }
    for (const Posynomial& c : p.constraints) CHECK(evaluate(c, r.x) <= 1.0 + 1e-9);
    bool inside = true;
    for (double x : r.x) inside = inside && std::abs(std::log(x)) < 2.5;
    if (!inside) continue;
    ++compared;
    const double g = log_grid_oracle(p);
    CHECK(r.objective <= g * (1 + 1e-9));
    CHECK(r.objective >= g * (1 - 1e-2));
  }
  CHECK(compared >= 80);
}

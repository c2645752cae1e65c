#include "ehdc/gp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ehdc/errors.hpp"

namespace ehdc::gp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// log sum_k exp(a_k . y + b_k)
struct LogSumExp {
  MatrixXd a;
  VectorXd b;

  double value(const VectorXd& y) const {
    const VectorXd z = a * y + b;
    const double m = z.maxCoeff();
    return m + std::log((z.array() - m).exp().sum());
  }

  // Value, gradient and Hessian in one pass.
  double eval(const VectorXd& y, VectorXd& grad, MatrixXd& hess) const {
    const VectorXd z = a * y + b;
    const double m = z.maxCoeff();
    VectorXd w = (z.array() - m).exp();
    const double s = w.sum();
    w /= s;
    grad = a.transpose() * w;
    hess = a.transpose() * w.asDiagonal() * a - grad * grad.transpose();
    return m + std::log(s);
  }
};

LogSumExp to_lse(const Posynomial& p, std::size_t n) {
  if (p.terms.empty()) throw StructuralError("posynomial has no terms");
  LogSumExp f{MatrixXd::Zero(static_cast<Eigen::Index>(p.terms.size()),
                             static_cast<Eigen::Index>(n)),
              VectorXd(static_cast<Eigen::Index>(p.terms.size()))};
  for (std::size_t k = 0; k < p.terms.size(); ++k) {
    const Monomial& m = p.terms[k];
    if (!(m.coefficient > 0.0) || !std::isfinite(m.coefficient)) {
      throw StructuralError("monomial coefficient must be positive");
    }
    f.b(static_cast<Eigen::Index>(k)) = std::log(m.coefficient);
    for (const auto& [var, e] : m.exponents) {
      if (var >= n) throw StructuralError("monomial uses an undeclared variable");
      f.a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(var)) += e;
    }
  }
  return f;
}

struct BarrierOutcome {
  VectorXd y;
  bool converged = false;
  bool stopped_early = false;
  std::vector<double> gaps;
};

// Minimizes f0 subject to fj < 0 along the central path from a strictly
// feasible y. `stop` may end the run after any Newton step.
BarrierOutcome barrier(const LogSumExp& f0, const std::vector<LogSumExp>& fs,
                       VectorXd y, const GpOptions& opt,
                       const std::function<bool(const VectorXd&)>& stop) {
  const Eigen::Index n = y.size();
  const double m = static_cast<double>(fs.size());
  BarrierOutcome out;

  auto phi = [&](const VectorXd& v, double t) {
    double s = t * f0.value(v);
    for (const auto& f : fs) {
      const double c = f.value(v);
      if (!(c < 0.0)) return kInf;
      s -= std::log(-c);
    }
    return s;
  };

  double t = 1.0;
  VectorXd g(n), gj(n);
  MatrixXd h(n, n), hj(n, n);
  for (int stage = 0; stage < opt.max_stages; ++stage) {
    for (int it = 0; it < opt.max_newton_per_stage; ++it) {
      f0.eval(y, g, h);
      g *= t;
      h *= t;
      for (const auto& f : fs) {
        const double c = f.eval(y, gj, hj);
        g += gj / -c;
        h += hj / -c + gj * gj.transpose() / (c * c);
      }
      VectorXd step;
      double reg = 0.0;
      for (int tries = 0; tries < 12; ++tries) {
        MatrixXd hr = h;
        if (reg > 0.0) hr.diagonal().array() += reg;
        Eigen::LDLT<MatrixXd> ldlt(hr);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
          step = -ldlt.solve(g);
          if (step.allFinite() && g.dot(step) < 0.0) break;
        }
        step.resize(0);
        reg = reg == 0.0 ? 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff())
                         : reg * 100.0;
      }
      if (step.size() == 0) step = -g;
      const double decrement = -g.dot(step);
      if (decrement / 2.0 <= 1e-12) break;

      const double base = phi(y, t);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const VectorXd trial = y + alpha * step;
        const double v = phi(trial, t);
        if (v <= base - 0.25 * alpha * decrement) {
          y = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      if (stop && stop(y)) {
        out.y = y;
        out.stopped_early = true;
        return out;
      }
    }
    const double gap = m / t;
    out.gaps.push_back(gap);
    if (gap < opt.tol) {
      out.converged = true;
      break;
    }
    t *= 10.0;
  }
  out.y = y;
  return out;
}

}  // namespace

double evaluate(const Posynomial& p, const std::vector<double>& x) {
  double s = 0.0;
  for (const Monomial& m : p.terms) {
    double v = m.coefficient;
    for (const auto& [var, e] : m.exponents) v *= std::pow(x.at(var), e);
    s += v;
  }
  return s;
}

GpResult solve_gp(const GeometricProgram& prog, const GpOptions& options,
                  const std::optional<std::vector<double>>& start) {
  const std::size_t n = prog.variables;
  if (n == 0) throw StructuralError("program has no variables");
  const LogSumExp f0 = to_lse(prog.objective, n);
  std::vector<LogSumExp> fs;
  for (const auto& c : prog.constraints) fs.push_back(to_lse(c, n));
  const auto ni = static_cast<Eigen::Index>(n);

  VectorXd y = VectorXd::Zero(ni);
  auto max_constraint = [&](const VectorXd& v) {
    double worst = -kInf;
    for (const auto& f : fs) worst = std::max(worst, f.value(v));
    return worst;
  };

  if (start) {
    if (start->size() != n) throw StructuralError("start has wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      if (!((*start)[i] > 0.0)) {
        throw StructuralError("start must be strictly positive");
      }
      y(static_cast<Eigen::Index>(i)) = std::log((*start)[i]);
    }
    if (!fs.empty() && !(max_constraint(y) < 0.0)) {
      throw InfeasibleError("start point is not strictly feasible");
    }
  } else if (!fs.empty() && !(max_constraint(y) < 0.0)) {
    // Phase one: minimize s subject to f_j(y) - s <= 0.
    LogSumExp obj{MatrixXd::Zero(1, ni + 1), VectorXd::Zero(1)};
    obj.a(0, ni) = 1.0;
    std::vector<LogSumExp> shifted;
    for (const auto& f : fs) {
      LogSumExp g{MatrixXd(f.a.rows(), ni + 1), f.b};
      g.a.leftCols(ni) = f.a;
      g.a.col(ni).setConstant(-1.0);
      shifted.push_back(std::move(g));
    }
    VectorXd z(ni + 1);
    z.head(ni) = y;
    z(ni) = max_constraint(y) + 1.0;
    GpOptions p1 = options;
    p1.tol = std::min(options.tol, 1e-9);
    const BarrierOutcome r = barrier(obj, shifted, z, p1, [&](const VectorXd& v) {
      return v(ni) < 0.0 && max_constraint(v.head(ni)) < -1e-9;
    });
    y = r.y.head(ni);
    if (!(max_constraint(y) < 0.0)) {
      throw InfeasibleError("geometric program has no interior point");
    }
  }

  const BarrierOutcome r = barrier(f0, fs, y, options, {});
  GpResult res;
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.x[i] = std::exp(r.y(static_cast<Eigen::Index>(i)));
  }
  res.objective = std::exp(f0.value(r.y));
  res.converged = r.converged;
  res.gap_history = r.gaps;
  return res;
}

}  // namespace ehdc::gp

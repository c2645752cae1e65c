#include "ehdc/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ehdc/bc.hpp"
#include "ehdc/mac.hpp"
#include "ehdc/oracle.hpp"
#include "ehdc/scenario_io.hpp"
#include "ehdc/single_user.hpp"
#include "ehdc/two_hop.hpp"
#include "ehdc/verify.hpp"

namespace ehdc::cli {

using nlohmann::json;

namespace {

struct SolveArgs {
  std::string scenario;
  std::string weights = "1,1";
  std::string mode = "simultaneous";
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::string out;
};

struct RegionArgs {
  std::string scenario;
  std::string mode = "simultaneous";
  int n_weights = 9;
  std::string out;
  std::string policies;
};

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 7;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DecodingMode parse_mode(const std::string& m) {
  if (m == "simultaneous") return DecodingMode::Simultaneous;
  if (m == "successive") return DecodingMode::Successive;
  throw UsageError("unknown mode '" + m + "'");
}

WeightPair parse_weights(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw UsageError("--weights expects 'mu1,mu2'");
  }
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double m1 = std::stod(a, &used1);
    const double m2 = std::stod(b, &used2);
    if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument("");
    return WeightPair(m1, m2).normalized();
  } catch (const DomainError& e) {
    throw UsageError(std::string("--weights: ") + e.what());
  } catch (const std::exception&) {
    throw UsageError("--weights expects two numbers 'mu1,mu2'");
  }
}

struct Loaded {
  json doc;
  Scenario scenario;
};

// Parse problems are usage errors; a well-formed scenario that breaks the
// model's rules is reported as infeasible.
Loaded load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::ParseError("cannot open '" + path + "'");
  Loaded l;
  try {
    l.doc = json::parse(in);
  } catch (const json::exception& e) {
    throw io::ParseError("'" + path + "': " + e.what());
  }
  l.scenario = io::parse_scenario(l.doc);
  const std::vector<std::string> bad = io::scenario_violations(l.doc, l.scenario);
  if (!bad.empty()) {
    std::string msg = "invalid scenario:";
    for (const std::string& b : bad) msg += "\n  " + b;
    throw DomainError(msg);
  }
  return l;
}

std::vector<double> vec(std::span<const double> v) {
  return {v.begin(), v.end()};
}

json tight_constraints(const Scenario& s, const oracle::Policies& p) {
  const oracle::AuditReport rep = oracle::audit(s, p);
  json out = json::object();
  for (const oracle::ConstraintSlack& f : rep.families) {
    double scale = 1.0;
    for (const auto& [role, e] : s.energy) scale = std::max(scale, e.total());
    std::vector<std::size_t> at;
    for (std::size_t k = 0; k < f.slack.size(); ++k) {
      if (f.slack[k] <= 1e-7 * scale) at.push_back(k + 1);
    }
    out[f.family] = at;
  }
  return out;
}

json point_json(const Scenario& s, const RegionPoint& pt, DecodingMode mode) {
  json r;
  r["mu1"] = pt.weights.mu1;
  r["mu2"] = pt.weights.mu2;
  r["b1"] = pt.b1;
  r["b2"] = pt.b2;
  r["weighted_value"] = pt.weighted_value();
  oracle::Policies pol;
  pol.p1 = vec(pt.first);
  pol.p2 = vec(pt.second);
  if (s.topology == Topology::Mac) {
    r["p1"] = pol.p1;
    r["p2"] = pol.p2;
    r["mode"] = mode == DecodingMode::Successive ? "successive" : "simultaneous";
    if (mode == DecodingMode::Successive) {
      pol.mode = mode;
      pol.decoded_last = pt.weights.mu1 >= pt.weights.mu2 ? 1 : 2;
      r["decoded_last"] = pol.decoded_last;
    }
  } else {
    r["p_t"] = pol.p1;
    r["p_2"] = pol.p2;
    std::vector<double> r1, r2;
    for (std::size_t i = 0; i < pol.p1.size(); ++i) {
      r2.push_back(s.link.rate(pol.p2[i]));
      r1.push_back(std::max(0.0, s.link.rate(pol.p1[i]) - r2.back()));
    }
    r["r1"] = r1;
    r["r2"] = r2;
  }
  r["tight"] = tight_constraints(s, pol);
  r["converged"] = pt.converged;
  r["iterations"] = pt.iterations;
  return r;
}

json solve_single(const Scenario& s) {
  json r;
  oracle::Policies pol;
  if (s.rx_has_battery) {
    const StaircaseSolution sol = solve_single_user(
        s.profile(Role::Tx), s.profile(Role::Rx), s.link);
    pol.rates = vec(sol.rates);
    r["rates"] = pol.rates;
    r["powers"] = vec(powers_for(sol.rates, s.link));
    r["throughput"] = sol.throughput();
    r["change_points"] = sol.change_points;
    std::vector<std::string> b;
    for (Binding x : sol.binding) b.push_back(to_string(x));
    r["binding"] = b;
  } else {
    const RatePolicy rates = solve_single_user_no_battery(
        s.profile(Role::Tx), s.profile(Role::Rx), s.link);
    pol.rates = vec(rates);
    r["rates"] = pol.rates;
    r["powers"] = vec(powers_for(rates, s.link));
    r["throughput"] = rates.total();
  }
  r["tight"] = tight_constraints(s, pol);
  r["converged"] = true;
  return r;
}

json solve_relay(const Scenario& s, const SolveArgs& a) {
  const TwoHopSolution sol = solve_two_hop(s, a.tol.value_or(1e-6),
                                           a.max_iters.value_or(10'000));
  oracle::Policies pol;
  pol.rates = vec(sol.source_rates);
  pol.relay_rates = vec(sol.relay_rates);
  json r;
  r["source_rates"] = pol.rates;
  r["relay_rates"] = pol.relay_rates;
  r["delta"] = vec(sol.delta.delta);
  r["throughput"] = sol.throughput;
  r["tight"] = tight_constraints(s, pol);
  r["converged"] = sol.converged;
  return r;
}

int write_text(const std::string& text, const std::string& path,
               std::ostream& out) {
  if (path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::ParseError("cannot write '" + path + "'");
  f << text;
  return kOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Loaded l = load(a.scenario);
  const Scenario& s = l.scenario;
  const DecodingMode mode = parse_mode(a.mode);
  const WeightPair w = parse_weights(a.weights);
  json r;
  switch (s.topology) {
    case Topology::SingleUser:
      r = solve_single(s);
      break;
    case Topology::TwoHop:
      r = solve_relay(s, a);
      break;
    case Topology::Mac:
      if (mode == DecodingMode::Simultaneous) {
        r = point_json(s, solve_mac_simultaneous(s, w, a.tol.value_or(1e-9)),
                       mode);
      } else {
        ScaOptions o;
        if (a.tol) o.tol = *a.tol;
        if (a.max_iters) o.max_iters = *a.max_iters;
        r = point_json(s, solve_mac_successive(s, w, std::nullopt, o), mode);
      }
      break;
    case Topology::Bc:
      r = point_json(s, solve_bc(s, w, a.tol.value_or(1e-9)), mode);
      break;
  }
  r["topology"] = to_string(s.topology);
  write_text(r.dump(2) + "\n", a.out, out);
  return r["converged"].get<bool>() ? kOk : kNotConverged;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_region(const RegionArgs& a, std::ostream& out) {
  const Loaded l = load(a.scenario);
  const Scenario& s = l.scenario;
  const DecodingMode mode = parse_mode(a.mode);
  if (a.n_weights < 3) throw UsageError("--n-weights must be at least 3");
  DepartureRegion region;
  if (s.topology == Topology::Mac) {
    region = sweep_region(s, mode, a.n_weights);
  } else if (s.topology == Topology::Bc) {
    region = sweep_bc_region(s, a.n_weights);
  } else {
    throw UsageError("region needs a mac or bc scenario, got " +
                     to_string(s.topology));
  }
  std::string csv = "mu1,mu2,b1,b2,converged\n";
  bool all = true;
  json pols = json::array();
  for (const RegionPoint& p : region.points) {
    csv += fmt12(p.weights.mu1) + "," + fmt12(p.weights.mu2) + "," +
           fmt12(p.b1) + "," + fmt12(p.b2) + "," +
           (p.converged ? "true" : "false") + "\n";
    all = all && p.converged;
    if (!a.policies.empty()) pols.push_back(point_json(s, p, region.mode));
  }
  write_text(csv, a.out, out);
  if (!a.policies.empty()) write_text(pols.dump(2) + "\n", a.policies, out);
  return all ? kOk : kNotConverged;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  std::vector<verify::CheckResult> results;
  try {
    results = verify::run_suite(a.suite, a.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool ok = true;
  for (const verify::CheckResult& r : results) {
    char line[128];
    std::snprintf(line, sizeof line, "%-36s %s", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL");
    out << line;
    if (!r.passed) out << "  " << r.detail;
    out << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kInfeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Offline transmission policies for energy-harvesting links",
               "ehdc"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Solve one scenario");
  solve->add_option("scenario", sa.scenario, "Scenario JSON file")->required();
  solve->add_option("--weights", sa.weights, "Weights mu1,mu2 (mac, bc)");
  solve->add_option("--mode", sa.mode, "simultaneous | successive (mac)");
  solve->add_option("--tol", sa.tol, "Solver tolerance");
  solve->add_option("--max-iters", sa.max_iters,
                    "Iteration cap (two_hop sweeps, mac successive rounds)");
  solve->add_option("--out", sa.out, "Output JSON path (default stdout)");

  RegionArgs ra;
  CLI::App* region = app.add_subcommand("region", "Sweep a departure region");
  region->add_option("scenario", ra.scenario, "Scenario JSON file")->required();
  region->add_option("--mode", ra.mode, "simultaneous | successive (mac)");
  region->add_option("--n-weights", ra.n_weights, "Number of weight pairs");
  region->add_option("--out", ra.out, "Output CSV path (default stdout)");
  region->add_option("--policies", ra.policies,
                     "Also write per-point policies as JSON here");

  VerifyArgs va;
  CLI::App* ver = app.add_subcommand("verify", "Run the property suites");
  ver->add_option("--suite", va.suite, "lemmas | oracle | all");
  ver->add_option("--seed", va.seed, "Random seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(sa, out);
    if (*region) return cmd_region(ra, out);
    return cmd_verify(va, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
}

}  // namespace ehdc::cli

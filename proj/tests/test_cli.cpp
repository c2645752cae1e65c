#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ehdc/cli.hpp"
#include "ehdc/scenario_io.hpp"

using namespace ehdc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kDir = EHDC_SCENARIO_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return kDir + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ehdc_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool reaudits(const std::string& scenario_path, const json& result) {
  const Scenario s = io::load_scenario(scenario_path);
  return oracle::audit(s, io::policies_from_json(result, s)).feasible;
}

}  // namespace

TEST_CASE("solve single-user reference scenario") {
  const Run r = run({"solve", scenario("single_user.json")});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  const double expect[] = {0.6061, 0.6061, 0.6061, 1.2528, 1.3863};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(j["rates"][i].get<double>() == doctest::Approx(expect[i]).epsilon(1e-3));
  }
  CHECK(j["converged"] == true);
  CHECK(j["binding"].size() == 3);
  CHECK(reaudits(scenario("single_user.json"), j));
}

TEST_CASE("every topology's solve output re-audits") {
  const std::pair<std::string, std::vector<std::string>> cases[] = {
      {"two_hop.json", {}},
      {"mac_reference.json", {"--weights", "1,2"}},
      {"mac_reference.json", {"--weights", "2,1", "--mode", "successive"}},
      {"mac_reference.json", {"--weights", "1,3", "--mode", "successive"}},
      {"bc_harvest_A.json", {"--weights", "1,2"}},
      {"bc_harvest_C.json", {"--weights", "3,1"}},
  };
  for (const auto& [file, extra] : cases) {
    std::vector<std::string> args{"solve", scenario(file)};
    args.insert(args.end(), extra.begin(), extra.end());
    const Run r = run(args);
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const json j = json::parse(r.out);
    CHECK(j["converged"] == true);
    CHECK_MESSAGE(reaudits(scenario(file), j), file);
    if (j.contains("mu1")) {
      CHECK(j["mu1"].get<double>() + j["mu2"].get<double>() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("solve writes to --out") {
  const fs::path out = scratch("solve.json");
  fs::remove(out);
  const Run r = run({"solve", scenario("bc_harvest_B.json"), "--out", out.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(out))["topology"] == "bc");
}

TEST_CASE("invalid scenarios exit 2") {
  Run r = run({"solve", scenario("bc_bad_sigma.json")});
  CHECK(r.code == cli::kInfeasible);
  CHECK(r.err.find("sigma2") != std::string::npos);

  const std::string mismatch = write("mismatch.json", R"({
    "topology": "single_user", "slots": 3,
    "energy": {"tx": [1, 1], "rx": [1, 1]}})");
  CHECK(run({"solve", mismatch}).code == cli::kInfeasible);

  const std::string missing = write("missing.json", R"({
    "topology": "mac", "energy": {"tx1": [1], "rx": [1]}})");
  CHECK(run({"solve", missing}).code == cli::kInfeasible);

  const std::string negative = write("negative.json", R"({
    "topology": "single_user", "energy": {"tx": [1, -1], "rx": [1, 1]}})");
  CHECK(run({"solve", negative}).code == cli::kInfeasible);
}

TEST_CASE("forced non-convergence exits 3 and still writes") {
  const Run r = run({"solve", scenario("mac_reference.json"), "--weights", "1,2",
                     "--mode", "successive", "--max-iters", "1", "--tol", "1e-14"});
  CHECK(r.code == cli::kNotConverged);
  const json j = json::parse(r.out);
  CHECK(j["converged"] == false);
  CHECK(j["p1"].size() == 3);
  CHECK(reaudits(scenario("mac_reference.json"), j));
}

TEST_CASE("usage and parse errors exit 1") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"solve"}).code == cli::kUsage);
  CHECK(run({"solve", scenario("nope.json")}).code == cli::kUsage);
  CHECK(run({"solve", write("bad.json", "{not json")}).code == cli::kUsage);
  CHECK(run({"solve", write("role.json",
                            R"({"topology": "single_user", "energy": {"tv": [1]}})")})
            .code == cli::kUsage);
  CHECK(run({"solve", write("topo.json", R"({"topology": "ring", "energy": {}})")})
            .code == cli::kUsage);
  CHECK(run({"solve", scenario("mac_reference.json"), "--weights", "1"}).code == cli::kUsage);
  CHECK(run({"solve", scenario("mac_reference.json"), "--weights", "a,b"}).code == cli::kUsage);
  CHECK(run({"solve", scenario("mac_reference.json"), "--weights", "0,0"}).code == cli::kUsage);
  CHECK(run({"solve", scenario("mac_reference.json"), "--mode", "both"}).code == cli::kUsage);
  CHECK(run({"region", scenario("single_user.json")}).code == cli::kUsage);
  CHECK(run({"region", scenario("two_hop.json")}).code == cli::kUsage);
  CHECK(run({"verify", "--suite", "unknown"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("region CSV is deterministic and well formed") {
  for (const std::string mode : {"simultaneous", "successive"}) {
    const fs::path a = scratch("a.csv"), b = scratch("b.csv");
    CHECK(run({"region", scenario("mac_reference.json"), "--mode", mode, "--out",
               a.string()}).code == cli::kOk);
    CHECK(run({"region", scenario("mac_reference.json"), "--mode", mode, "--out",
               b.string()}).code == cli::kOk);
    const std::string ta = slurp(a);
    CHECK(ta == slurp(b));
    std::istringstream lines(ta);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "mu1,mu2,b1,b2,converged");
    int rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      CHECK(line.substr(line.rfind(',') + 1) == "true");
    }
    CHECK(rows == 9);
  }
}

TEST_CASE("region policies re-audit") {
  for (const std::string file : {"mac_reference.json", "bc_harvest_A.json"}) {
    for (const std::string mode : {"simultaneous", "successive"}) {
      const fs::path p = scratch("pol.json");
      const Run r = run({"region", scenario(file), "--mode", mode, "--n-weights",
                         "5", "--policies", p.string()});
      REQUIRE(r.code == cli::kOk);
      const json all = json::parse(slurp(p));
      CHECK(all.size() == 5);
      for (const json& pt : all) CHECK(reaudits(scenario(file), pt));
    }
  }
}

TEST_CASE("verify suites") {
  Run r = run({"verify", "--suite", "lemmas", "--seed", "7"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run({"verify", "--suite", "oracle", "--seed", "7"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(run({"verify", "--suite", "oracle", "--seed", "7"}).out == r.out);
}

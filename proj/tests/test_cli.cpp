#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nfield/cli.hpp"
#include "nfield/config.hpp"
#include "nfield/errors.hpp"

using namespace nfield;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string bundled_config() {
  const char* dir = std::getenv("NFIELD_CONFIG_DIR");
  return std::string(dir ? dir : "configs") + "/paper_sec5.json";
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nfield_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors", "[cli]") {
  const Result r = run_cli({"frobnicate"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({}).code == kExitConfig);
  CHECK(run_cli({"classify"}).code == kExitConfig);
  CHECK(run_cli({"classify", "--z", "one"}).code == kExitConfig);
  CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("classify from the command line", "[cli]") {
  const Result r = run_cli({"--config", bundled_config(), "classify", "--z", "-1.0"});
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out).at("kind") == "Essential");

  const Result h = run_cli({"classify", "--z", "0,1.34"});
  REQUIRE(h.code == kExitOk);
  const auto j = nlohmann::json::parse(h.out);
  CHECK(j.at("kind") == "Eigenvalue");
  CHECK(std::abs(j.at("eigenpair").at("z").at(1).get<double>() - 1.3403) < 1e-3);

  CHECK(nlohmann::json::parse(run_cli({"classify", "--z", "0.5"}).out).at("kind") == "Resolvent");
  CHECK(nlohmann::json::parse(run_cli({"classify", "--z", "-2+0i"}).out).at("kind") == "Resonant");
}

TEST_CASE("slp-roots CSV", "[cli]") {
  const Result r = run_cli({"slp-roots", "--k", "0", "--count", "4"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,re_rho,im_rho,parity,residual");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("0,0,0,even,", 0) == 0);
  CHECK(rows[1].find(",odd,") != std::string::npos);
  CHECK(rows[2].find(",even,") != std::string::npos);
}

TEST_CASE("resolvent-check", "[cli]") {
  const Result r = run_cli({"resolvent-check", "--z", "0.5", "--nodes", "48"});
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out).at("relative_error").get<double>() <= 1e-6);
}

TEST_CASE("configuration files", "[cli][config]") {
  const RunConfig bundled = load_run_config(bundled_config());
  CHECK(bundled.model == reference_params(-3.27));
  CHECK(bundled.lyapunov.epsilon == 0.01);
  CHECK(bundled.lyapunov.n_z == 32);
  CHECK(bundled.lyapunov.n_x == 3);
  CHECK(bundled.hopf.lo == -4.0);
  CHECK(bundled.hopf.hi == -2.5);

  SECTION("round trip") {
    RunConfig c = bundled;
    c.spectrum.seeds.push_back({cplx(0.1, 1.0), cplx(-0.2, 1.1), cplx(0.3, 0.4)});
    c.simulate.probes.push_back({0.5, -0.25});
    c.output_dir = "results";
    const nlohmann::json j = c;
    CHECK(parse_run_config(j.dump(2)) == c);
    CHECK(parse_run_config(j.dump()) == c);
  }

  SECTION("syntax errors carry the line") {
    const std::string text = "{\n  \"model\": {\n    \"alpha\": 1,\n    \"tau0\": ,\n  }\n}\n";
    try {
      parse_run_config(text, "broken.json");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("broken.json:4:") != std::string::npos);
      CHECK(msg.find("\"tau0\": ,") != std::string::npos);
    }
  }

  SECTION("semantic errors") {
    CHECK_THROWS_AS(parse_run_config("{}"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[1, 2]"), ConfigError);
    nlohmann::json j = bundled;
    j["lyapunov"]["n_z"] = "many";
    CHECK_THROWS_AS(parse_run_config(j.dump()), ConfigError);
    j = bundled;
    j["hopf"]["range"] = {1.0};
    CHECK_THROWS_AS(parse_run_config(j.dump()), ConfigError);
    j = bundled;
    j["quadrature"]["nodez"] = 12;
    CHECK_THROWS_AS(parse_run_config(j.dump()), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
  }

  SECTION("bad files exit with the config status") {
    const auto dir = scratch_dir("badcfg");
    std::ofstream(dir / "bad.json") << "{ \"model\": 3 ";
    const Result r = run_cli({"--config", (dir / "bad.json").string(), "classify", "--z", "0.5"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("bad.json:1:") != std::string::npos);
  }
}

TEST_CASE("simulate output files are deterministic", "[cli]") {
  const auto d1 = scratch_dir("sim1"), d2 = scratch_dir("sim2");
  const std::vector<std::string> common = {"simulate", "--c-hat", "-4", "--n-grid", "8", "--t-end", "5",
                                           "--history", "constant", "--amplitude", "0.2", "--snapshot-stride", "50",
                                           "--probe", "0,0", "--probe", "0.5,0.5"};
  auto args1 = common, args2 = common;
  args1.insert(args1.begin(), {"--out", d1.string()});
  args2.insert(args2.begin(), {"--out", d2.string()});
  const Result r1 = run_cli(args1), r2 = run_cli(args2);
  REQUIRE(r1.code == kExitOk);
  CHECK(r1.out == r2.out);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string csv = slurp(d1 / "simulation_probes.csv");
  CHECK(csv.rfind("t,V_0,V_1\n", 0) == 0);
  CHECK(csv == slurp(d2 / "simulation_probes.csv"));
  CHECK(std::filesystem::exists(d1 / "simulation_snapshot_00001.dat"));
  CHECK(slurp(d1 / "simulation_snapshot_00001.dat") == slurp(d2 / "simulation_snapshot_00001.dat"));
  CHECK(std::filesystem::exists(d1 / "simulation.gp"));

  CHECK(run_cli({"simulate", "--history", "sideways"}).code == kExitConfig);
  CHECK(run_cli({"simulate", "--dt", "3", "--history", "zero"}).code == kExitConfig);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavetrap/runner.hpp"

using namespace wavetrap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("wavetrap_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string write_config(const std::string& dir, const std::string& text) {
  const std::string path = dir + "/scenario.cfg";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("manifest round-trips through json") {
  RunManifest m;
  m.scenario_id = "demo";
  m.config_path = "/tmp/x.cfg";
  m.out_dir = "/tmp/out";
  m.seed = 7;
  m.subcommands = {{"simulate", {}}, {"audit", {{"audit.R", 4.0}}}};
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.scenario_id == "demo");
  CHECK(back.seed == 7);
  REQUIRE(back.subcommands.size() == 2);
  CHECK(back.subcommands[1].params.at("audit.R") == 4.0);
  CHECK(back.to_json() == m.to_json());
}

TEST_CASE("run artifact round-trips and validates") {
  const std::string dir = temp_dir("artifact");
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.q0 = Vec3{0.4, 0, 0};
  cfg.horizon = 2.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  FullConfig full;
  full.scenario = cfg;
  full.diag = diagnostic_defaults();
  write_run_artifact(rec, full, dir);

  const SimulationRecord back = load_run_artifact(dir);
  CHECK(back.history.size() == rec.history.size());
  CHECK(norm(back.history.knot_q(50) - rec.history.knot_q(50)) < 1e-15);
  CHECK(back.forces.size() == rec.forces.size());
}

TEST_CASE("corrupted artifacts are rejected with a diagnostic") {
  const std::string dir = temp_dir("corrupt");
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.q0 = Vec3{0.4, 0, 0};
  cfg.horizon = 1.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  FullConfig full;
  full.scenario = cfg;
  full.diag = diagnostic_defaults();
  write_run_artifact(rec, full, dir);

  // inject a nonfinite knot
  std::string text = slurp(dir + "/run.csv");
  const auto pos = text.rfind("\n0.9");
  REQUIRE(pos != std::string::npos);
  text.replace(pos + 1, 3, "nan");
  std::ofstream(dir + "/run.csv", std::ios::binary) << text;
  CHECK_THROWS(load_run_artifact(dir));
}

TEST_CASE("stationary manifest passes every requested check") {
  const std::string dir = temp_dir("stationary");
  const std::string cfg_path = write_config(
      dir,
      "rho.kind = bump\npotential.kind = harmonic\nfield.kind = matched\n"
      "run.T = 4\nrun.h = 0.02\nradiation.dt = 0.25\n");
  RunManifest m;
  m.scenario_id = "stationary-smoke";
  m.config_path = cfg_path;
  m.out_dir = dir + "/out";
  m.subcommands = {{"simulate", {}}, {"radiation", {}}};
  const ExecutionResult res = execute(m);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir + "/out/run.csv"));
  CHECK(fs::exists(dir + "/out/radiation.csv"));
  CHECK(fs::exists(dir + "/out/summary.json"));
  const std::string summary = slurp(dir + "/out/summary.json");
  CHECK(summary.find("\"final_distance_to_minimum\"") != std::string::npos);
}

TEST_CASE("wiener gate fails the shell density and names the check") {
  const std::string dir = temp_dir("shellgate");
  const std::string cfg_path =
      write_config(dir, "rho.kind = shell\nwiener.gate = 1\nwiener.k_max = 20\n");
  RunManifest m;
  m.scenario_id = "shell-gate";
  m.config_path = cfg_path;
  m.out_dir = dir + "/out";
  m.subcommands = {{"wiener", {}}};
  const ExecutionResult res = execute(m);
  CHECK(res.exit_code == 1);
  const std::string summary = slurp(dir + "/out/summary.json");
  CHECK(summary.find("wiener_verdict") != std::string::npos);
  const std::string rep = slurp(dir + "/out/wiener.json");
  CHECK(rep.find("\"verdict\":\"fail\"") != std::string::npos);
}

TEST_CASE("identical manifest and seed give byte-identical csv outputs") {
  const std::string dir = temp_dir("determinism");
  const std::string cfg_path = write_config(
      dir,
      "rho.kind = bump\ninit.q1 = 0.5\nrun.T = 6\nrun.h = 0.02\nradiation.dt = 0.5\n");
  RunManifest m;
  m.scenario_id = "det";
  m.config_path = cfg_path;
  m.seed = 42;
  m.subcommands = {{"simulate", {}}, {"radiation", {}}};
  m.out_dir = dir + "/a";
  execute(m);
  m.out_dir = dir + "/b";
  execute(m);
  CHECK(slurp(dir + "/a/run.csv") == slurp(dir + "/b/run.csv"));
  CHECK(slurp(dir + "/a/forces.csv") == slurp(dir + "/b/forces.csv"));
  CHECK(slurp(dir + "/a/radiation.csv") == slurp(dir + "/b/radiation.csv"));
}

TEST_CASE("unknown subcommands and parameters are rejected") {
  const std::string dir = temp_dir("badsub");
  const std::string cfg_path = write_config(dir, "run.T = 1\n");
  RunManifest m;
  m.config_path = cfg_path;
  m.out_dir = dir + "/out";
  m.subcommands = {{"explode", {}}};
  CHECK_THROWS_AS(execute(m), std::invalid_argument);
  m.subcommands = {{"audit", {{"audit.nope", 1.0}}}};
  CHECK_THROWS_AS(execute(m), std::invalid_argument);
}

}  // TEST_SUITE

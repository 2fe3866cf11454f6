#include <doctest.h>

#include "wavetrap/config.hpp"

using namespace wavetrap;

TEST_SUITE("config") {

TEST_CASE("minimal config fills defaults") {
  const FullConfig cfg = parse_config("rho.kind = bump\npotential.kind = harmonic\nrun.T = 100\n");
  CHECK(cfg.scenario.rho_kind == "bump");
  CHECK(cfg.scenario.horizon == 100.0);
  CHECK(cfg.scenario.plane_mode);
  CHECK(cfg.scenario.quad.ball_r == 16);
  CHECK(cfg.scenario.step == 0.0);  // resolved to 0.02 R at run time
  CHECK(cfg.diag.at("ratefit.alpha") == 1.5);
}

TEST_CASE("comments and blank lines are ignored") {
  const FullConfig cfg = parse_config("# a comment\n\nrun.T = 50 # trailing\n");
  CHECK(cfg.scenario.horizon == 50.0);
}

TEST_CASE("unknown keys are fatal") {
  CHECK_THROWS_WITH_AS(parse_config("rho.kindd = bump\n"),
                       doctest::Contains("unknown key 'rho.kindd'"), std::invalid_argument);
}

TEST_CASE("type mismatches name the key") {
  CHECK_THROWS_WITH_AS(parse_config("run.T = fast\n"), doctest::Contains("run.T"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("run.plane = maybe\n"), doctest::Contains("run.plane"),
                       std::invalid_argument);
}

TEST_CASE("plane constraint violations name the constraint") {
  CHECK_THROWS_WITH_AS(parse_config("run.plane = true\ninit.q3 = 0.1\n"),
                       doctest::Contains("init.q3"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("init.p3 = 0.1\n"), doctest::Contains("init.p3"),
                       std::invalid_argument);
  // allowed when plane mode is off
  const FullConfig cfg = parse_config("run.plane = false\ninit.q3 = 0.1\n");
  CHECK(cfg.scenario.q0.z == 0.1);
}

TEST_CASE("round trip is lossless") {
  const std::string text =
      "rho.kind = bump\nrho.charge = 2\npotential.kind = quartic\npotential.lambda = 0.3\n"
      "init.q1 = 0.5\ninit.p2 = -0.25\nfield.kind = pulse\nfield.radius = 1.5\n"
      "run.h = 0.01\nrun.T = 42\nrun.plane = true\nquad.ball_r = 24\n"
      "ratefit.alpha = 2.5\nwiener.gate = 1\n";
  const FullConfig a = parse_config(text);
  const std::string ser = serialize_config(a);
  const FullConfig b = parse_config(ser);
  CHECK(serialize_config(b) == ser);
  CHECK(b.scenario.rho_params.at("charge") == 2.0);
  CHECK(b.scenario.potential_params.at("lambda") == 0.3);
  CHECK(b.scenario.q0.x == 0.5);
  CHECK(b.diag.at("ratefit.alpha") == 2.5);
  CHECK(b.diag.at("wiener.gate") == 1.0);
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS_AS(parse_config("rho.kind bump\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("quad.ball_r = 1\n"), std::invalid_argument);
}

}  // TEST_SUITE

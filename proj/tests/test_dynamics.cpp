#include <doctest.h>

#include <cmath>

#include "wavetrap/dynamics.hpp"

using namespace wavetrap;

namespace {

ScenarioConfig damped_config(double T = 10.0, double h = 0.02) {
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.potential_kind = "harmonic";
  cfg.q0 = Vec3{1.0, 0.0, 0.0};
  cfg.field_kind = "zero";
  cfg.horizon = T;
  cfg.step = h;
  return cfg;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("stationary start is an exact fixed point") {
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.potential_kind = "harmonic";
  cfg.q0 = Vec3{};
  cfg.field_kind = "matched";
  cfg.horizon = 5.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  double dmax = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < rec.history.size(); ++i) {
    dmax = std::max(dmax, norm(rec.history.knot_q(i)));
    vmax = std::max(vmax, norm(rec.history.knot_v(i)));
  }
  CHECK(dmax < 1e-10);
  CHECK(vmax < 1e-10);
}

TEST_CASE("decoupled oscillator is integrated at 4th order") {
  auto run = [&](double h) {
    ScenarioConfig cfg;
    cfg.rho_kind = "zero";
    cfg.potential_kind = "harmonic";
    cfg.q0 = Vec3{1.0, 0.0, 0.0};
    cfg.field_kind = "zero";
    cfg.horizon = 10.0;
    cfg.step = h;
    const SimulationRecord rec = simulate(cfg);
    const Vec3 qT = rec.history.knot_q(rec.history.size() - 1);
    return std::fabs(qT.x - std::cos(10.0));
  };
  const double e1 = run(0.04), e2 = run(0.02);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
  CHECK(e2 < 1e-7);
}

TEST_CASE("self force vanishes for symmetric starts") {
  // matched start: radially symmetric field against the odd gradient
  ScenarioConfig cfg = damped_config(1.0);
  cfg.field_kind = "matched";
  cfg.q0 = Vec3{0.5, 0.0, 0.0};
  const Scenario sc = build_scenario(cfg);
  TrajectoryHistory hist(0.02);
  hist.append(cfg.q0, Vec3{}, Vec3{});
  HistoryView view(hist);
  const SelfForce force(sc, view, 5, cfg.quad);
  const ForceParts at0 = force.eval(cfg.q0, 0.0, sc.potential);
  CHECK(norm(at0.self) < 1e-14);
  CHECK(norm(at0.kirchhoff) < 1e-14);

  // zero fields at t = 0
  ScenarioConfig zcfg = damped_config(1.0);
  const Scenario zsc = build_scenario(zcfg);
  const SelfForce zforce(zsc, view, 5, zcfg.quad);
  const ForceParts z0 = zforce.eval(cfg.q0, 0.0, zsc.potential);
  CHECK(norm(z0.self) == 0.0);
  CHECK(norm(z0.kirchhoff) == 0.0);
}

TEST_CASE("frozen source exerts the static two-center force") {
  ScenarioConfig cfg = damped_config(1.0);
  const Scenario sc = build_scenario(cfg);
  const ChargeDensity& rho = sc.rho;
  const Vec3 qsrc{0.3, 0.0, 0.0};
  TrajectoryHistory hist(0.05);
  for (int i = 0; i <= 200; ++i) hist.append(qsrc, Vec3{}, Vec3{});  // T = 10, saturated
  HistoryView view(hist);
  const SelfForce force(sc, view, 5, cfg.quad);
  for (const Vec3& q : {Vec3{1.2, 0.0, 0.0}, Vec3{0.8, 0.5, 0.0}}) {
    const ForceParts parts = force.eval(q, 10.0, sc.potential);
    const Vec3 c = q - qsrc;
    const double a = norm(c);
    const Vec3 want = -(rho.two_center_force(a) / a) * c;
    CHECK(norm(parts.self - want) < 1e-6 * std::max(1e-6, norm(want)));
    // attraction: the force points back toward the frozen source
    CHECK(dot(parts.self, c) < 0.0);
  }
}

TEST_CASE("fast force agrees with the field-integral quadrature route") {
  ScenarioConfig cfg = damped_config(4.0, 0.02);
  cfg.field_kind = "pulse";
  cfg.field_params = {{"radius", 1.0}, {"pi_amp", 0.4}};
  const SimulationRecord rec = simulate(cfg);
  const HistoryView view = rec.view();
  const SelfForce force(rec.scenario, view, rec.config.panel_order, rec.config.quad);
  const Kin k = view.state(3.0);
  const ForceParts fast = force.eval(k.q, 3.0, rec.scenario.potential);
  const Vec3 slow = force.quadrature_route(k.q, 3.0);
  const Vec3 field_force = fast.self + fast.kirchhoff;
  CHECK(norm(field_force - slow) < 2e-4 * std::max(1e-4, norm(field_force)));
  // the free-function contract route computes the same integral
  const Vec3 op = self_force(rec.scenario.rho, view, rec.scenario.field, k.q, 3.0,
                             rec.config.quad, rec.config.panel_order);
  CHECK(norm(op - slow) < 1e-12);
}

TEST_CASE("matched start with extra pulse data: force routes agree") {
  ScenarioConfig cfg = damped_config(4.0, 0.02);
  cfg.field_kind = "matched_plus_pulse";
  cfg.q0 = Vec3{0.3, 0.0, 0.0};
  cfg.field_params = {{"pulse_center1", 0.4}, {"pulse_center2", 0.5},
                      {"pulse_radius", 1.0},  {"pulse_pi_amp", 0.4},
                      {"pulse_phi_amp", 0.3}};
  const SimulationRecord rec = simulate(cfg);
  REQUIRE(rec.scenario.ref_center.has_value());
  REQUIRE(rec.scenario.deviation_field.pulses.size() == 1);
  const HistoryView view = rec.view();
  const SelfForce force(rec.scenario, view, rec.config.panel_order, rec.config.quad);
  for (double t : {1.0, 3.0}) {
    const Kin k = view.state(t);
    const ForceParts fast = force.eval(k.q, t, rec.scenario.potential);
    const Vec3 slow = force.quadrature_route(k.q, t);
    CHECK(norm(fast.self + fast.kirchhoff - slow) <
          5e-4 * std::max(1e-4, norm(fast.self + fast.kirchhoff)));
  }
}

TEST_CASE("matched-start fast force matches the quadrature route mid-run") {
  ScenarioConfig cfg = damped_config(4.0, 0.02);
  cfg.field_kind = "matched";
  cfg.q0 = Vec3{0.6, 0.0, 0.0};
  const SimulationRecord rec = simulate(cfg);
  const HistoryView view = rec.view();
  const SelfForce force(rec.scenario, view, rec.config.panel_order, rec.config.quad);
  const Kin k = view.state(3.5);
  const ForceParts fast = force.eval(k.q, 3.5, rec.scenario.potential);
  const Vec3 slow = force.quadrature_route(k.q, 3.5);
  CHECK(norm(fast.self + fast.kirchhoff - slow) < 5e-4 * std::max(1e-4, norm(fast.self)));
}

TEST_CASE("plane invariance is exact for zero-data planar runs") {
  const SimulationRecord rec = simulate(damped_config(8.0));
  double zmax = 0.0;
  for (std::size_t i = 0; i < rec.history.size(); ++i)
    zmax = std::max(zmax, std::fabs(rec.history.knot_q(i).z) + std::fabs(rec.history.knot_v(i).z));
  CHECK(zmax == 0.0);
}

TEST_CASE("plane invariance with pulse data stays below tolerance") {
  ScenarioConfig cfg = damped_config(6.0);
  cfg.field_kind = "pulse";
  cfg.field_params = {{"radius", 1.0}, {"pi_amp", 0.5}};
  const SimulationRecord rec = simulate(cfg);
  double zmax = 0.0;
  for (std::size_t i = 0; i < rec.history.size(); ++i)
    zmax = std::max(zmax, std::fabs(rec.history.knot_q(i).z) + std::fabs(rec.history.knot_v(i).z));
  CHECK(zmax < 1e-12);
}

TEST_CASE("step-halving self convergence of the coupled system") {
  auto endpoint = [&](double h) {
    const SimulationRecord rec = simulate(damped_config(8.0, h));
    return rec.history.knot_q(rec.history.size() - 1);
  };
  const Vec3 q1 = endpoint(0.04), q2 = endpoint(0.02), q3 = endpoint(0.01);
  const double e1 = norm(q1 - q2), e2 = norm(q2 - q3);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.0);
  CHECK(order <= 5.5);
}

TEST_CASE("forces recorded at knots sum to the stored acceleration") {
  const SimulationRecord rec = simulate(damped_config(2.0));
  REQUIRE(rec.forces.size() == rec.history.size());
  for (std::size_t i = 0; i < rec.forces.size(); ++i)
    CHECK(norm(rec.forces[i].total() - rec.history.knot_a(i)) == 0.0);
}

TEST_CASE("superluminal kick completes and reports the cone threshold") {
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.potential_kind = "harmonic";
  cfg.q0 = Vec3{};
  cfg.p0 = Vec3{1.5, 0.0, 0.0};
  cfg.field_kind = "zero";
  cfg.horizon = 12.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  CHECK(rec.history.speed_bound() >= 1.5);
  CHECK(rec.theta > std::sqrt(1.0 - 1.0 / (1.5 * 1.5)) - 1e-9);
  CHECK(rec.theta < 1.0);
}

TEST_CASE("escape radius aborts runaway configurations") {
  ScenarioConfig cfg = damped_config(5.0);
  cfg.p0 = Vec3{2.0, 0.0, 0.0};
  cfg.escape_radius = 0.8;
  CHECK_THROWS_AS(simulate(cfg), std::runtime_error);
}

TEST_CASE("horizon must be a multiple of the step") {
  ScenarioConfig cfg = damped_config(10.0, 0.3);
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
}

TEST_CASE("plane mode rejects off-plane starts") {
  ScenarioConfig cfg = damped_config(1.0);
  cfg.q0.z = 0.1;
  CHECK_THROWS_AS(build_scenario(cfg), std::invalid_argument);
}

TEST_CASE("nonlinear remainder vanishes at the origin and scales quadratically") {
  const ChargeDensity rho = charge_catalog("bump");
  const ConfiningPotential V = potential_catalog("harmonic");

  DeviationState zero;
  zero.psi = [](const Vec3&) { return 0.0; };
  zero.q = Vec3{};
  const RemainderValue b0 = nonlinear_remainder(rho, V, V.nu0_sq, zero);
  CHECK(b0.field_l2 < 1e-14);
  CHECK(norm(b0.particle_component) < 1e-14);

  // harmonic potential: -grad V + nu0^2 q cancels exactly in B
  const Vec3 qtest{0.3, 0.0, 0.0};
  CHECK(norm(-V.gradient(qtest) + V.nu0_sq * qtest) == 0.0);

  // quadratic scaling along a fixed ray in state space
  auto psi_hat = [&rho](const Vec3& x) {
    return rho.coulomb(norm(x - Vec3{0.2, 0, 0})) - rho.coulomb(norm(x));
  };
  double prev = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double s = 1.0 / std::pow(2.0, k);
    DeviationState X;
    X.psi = [psi_hat, s](const Vec3& x) { return s * psi_hat(x); };
    X.q = s * Vec3{0.2, 0.1, 0.0};
    const double n = nonlinear_remainder(rho, V, V.nu0_sq, X).norm();
    if (k > 0) CHECK(prev / n == doctest::Approx(4.0).epsilon(0.10));
    prev = n;
  }
}

TEST_CASE("splitting consistency: A + B reproduces the full right-hand side") {
  // particle side: -(nu0^2+nu1^2) q + int psi grad rho + B_particle equals
  // -grad V(q) + int (s0 + psi) grad rho(x - q)
  const ChargeDensity rho = charge_catalog("bump");
  const ConfiningPotential V = potential_catalog("harmonic");
  auto psi = [&rho](const Vec3& x) {
    return 0.3 * (rho.coulomb(norm(x - Vec3{0.25, 0, 0})) - rho.coulomb(norm(x)));
  };
  const Vec3 q{0.2, -0.1, 0.0};

  const BallRule ball(q, rho.support_radius(), 24, 16, 32);
  Vec3 full{};
  for (const auto& node : ball.nodes) {
    const Vec3 g = rho.grad_rho3(node.x - q);
    const double phi = rho.coulomb(norm(node.x)) + psi(node.x);
    full += (node.w * phi) * g;
  }
  full += -V.gradient(q);

  const BallRule ball0({}, rho.support_radius(), 24, 16, 32);
  Vec3 coupling{};
  for (const auto& node : ball0.nodes)
    coupling += (node.w * psi(node.x)) * rho.grad_rho3(node.x);
  DeviationState X;
  X.psi = psi;
  X.q = q;
  const RemainderValue B = nonlinear_remainder(rho, V, V.nu0_sq, X, QuadOrders{24, 16, 32, 24, 48});
  const Vec3 split = -(V.nu0_sq + rho.nu1_sq()) * q + coupling + B.particle_component;
  CHECK(norm(split - full) < 1e-5 * std::max(1.0, norm(full)));
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wavetrap/diagnostics.hpp"

using namespace wavetrap;

namespace {

const SimulationRecord& stationary_run() {
  static SimulationRecord rec = [] {
    ScenarioConfig cfg;
    cfg.rho_kind = "bump";
    cfg.potential_kind = "harmonic";
    cfg.field_kind = "matched";
    cfg.horizon = 12.0;
    cfg.step = 0.02;
    return simulate(cfg);
  }();
  return rec;
}

const SimulationRecord& damped_run() {
  static SimulationRecord rec = [] {
    ScenarioConfig cfg;
    cfg.rho_kind = "bump";
    cfg.potential_kind = "harmonic";
    cfg.q0 = Vec3{1.0, 0.0, 0.0};
    cfg.field_kind = "zero";
    cfg.horizon = 24.0;
    cfg.step = 0.02;
    return simulate(cfg);
  }();
  return rec;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("local energy of the stationary state is constant and matches the closed form") {
  const SimulationRecord& rec = stationary_run();
  const double R = 4.0;
  const QuadOrders fine{64, 24, 48, 24, 48};
  const double e1 = local_energy(rec, R, 2.0, fine);
  const double e2 = local_energy(rec, R, 10.0, fine);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
  // total stationary energy minus the exterior coulomb-gradient tail Q^2/(8 pi R)
  const double want = 0.5 * rec.scenario.rho.self_energy() - 1.0 / (8.0 * kPi * R);
  CHECK(e1 == doctest::Approx(want).epsilon(2e-4));
}

TEST_CASE("local energy for the decoupled particle at the minimum") {
  ScenarioConfig cfg;
  cfg.rho_kind = "zero";
  cfg.potential_kind = "harmonic";
  cfg.field_kind = "zero";
  cfg.horizon = 2.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  CHECK(local_energy(rec, 3.0, 1.0, rec.config.quad) == doctest::Approx(0.0));
}

TEST_CASE("flux balance: stationary state moves no energy") {
  const SimulationRecord& rec = stationary_run();
  const FluxBalance fb = flux_balance(rec, 4.0, 0.0, 6.0, rec.config.quad);
  CHECK(std::fabs(fb.delta_h) < 1e-9);
  CHECK(std::fabs(fb.flux_out) < 1e-9);
}

TEST_CASE("flux balance closes for the damped run") {
  const SimulationRecord& rec = damped_run();
  const FluxBalance fb = flux_balance(rec, 4.0, 0.0, 16.0, rec.config.quad);
  CHECK(fb.delta_h > 0.0);  // energy leaves the ball
  CHECK(fb.mismatch <= 1e-3 * (std::fabs(fb.delta_h) + std::fabs(fb.flux_out)) + 1e-6);
}

TEST_CASE("radiation functional: stationary run radiates nothing, damped run is monotone") {
  const DiagnosticSeries zero = radiation_functional(stationary_run(), 0.0, 10.0, 0.5);
  CHECK(zero.values.back() < 1e-20);

  const DiagnosticSeries rad = radiation_functional(damped_run(), 0.0, 20.0, 0.25);
  CHECK(rad.values.back() > 1e-5);
  for (std::size_t i = 1; i < rad.size(); ++i) CHECK(rad.values[i] >= rad.values[i - 1] - 1e-15);
}

TEST_CASE("g_omega reproduces the emission-time kernel") {
  const SimulationRecord& rec = damped_run();
  const Vec3 om{0.5, 0.0, std::sqrt(0.75)};
  const HistoryView view = rec.view();
  for (double tau : {4.0, 9.0, 15.0}) {
    const Kin k = view.state(tau);
    const double theta = tau - dot(om, k.q);
    const double denom = 1.0 - dot(om, k.v);
    const double want = dot(om, k.a) / (denom * denom * denom);
    CHECK(g_omega(rec, om, theta) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("g_omega of uniform motion vanishes and the identity map inverts exactly") {
  ScenarioConfig cfg;
  cfg.rho_kind = "bump";
  cfg.potential_kind = "harmonic";
  cfg.field_kind = "zero";
  cfg.horizon = 4.0;
  cfg.step = 0.02;
  SimulationRecord rec = simulate(cfg);  // particle rests at the minimum
  const Vec3 om{0, 0, 1};
  CHECK(g_omega(rec, om, 2.0) == 0.0);  // r = omega . q = 0, tau(theta) = theta
  const ConvolutionCheck cc = convolution_check(rec, om, 2.0);
  CHECK(cc.lhs == doctest::Approx(0.0));
  CHECK(cc.rhs == doctest::Approx(0.0));
}

TEST_CASE("convolution representation equals the far-field amplitude on the cone") {
  const SimulationRecord& rec = damped_run();
  for (const Vec3& om : {Vec3{0.5, 0.0, std::sqrt(0.75)}, Vec3{0.3, 0.3, std::sqrt(0.82)}}) {
    for (double t : {8.0, 12.0, 16.0}) {
      const ConvolutionCheck cc = convolution_check(rec, om, t);
      CHECK(cc.diff <= 1e-3 * std::max(std::fabs(cc.lhs), 1e-8));
    }
  }
}

TEST_CASE("relaxation series: control run keeps its envelope") {
  ScenarioConfig cfg;
  cfg.rho_kind = "zero";
  cfg.potential_kind = "harmonic";
  cfg.q0 = Vec3{1.0, 0.0, 0.0};
  cfg.field_kind = "zero";
  cfg.horizon = 40.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  const RelaxationSeries r = relaxation_series(rec);
  CHECK(r.envelope_ratio == doctest::Approx(1.0).epsilon(0.01));

  const RelaxationSeries st = relaxation_series(stationary_run());
  CHECK(st.peak_speed < 1e-10);
}

TEST_CASE("weighted deviation norm: stationary state sits at zero") {
  const SimulationRecord& rec = stationary_run();
  const WeightedNorm wn = weighted_deviation_norm(rec, 1.5, 6.0, 8.0, rec.config.quad);
  CHECK(wn.total < 1e-7);
}

TEST_CASE("weighted deviation norm at t = 0 matches the radial oracle") {
  const SimulationRecord& rec = damped_run();
  const double alpha = 1.5, rt = 8.0;
  const WeightedNorm wn = weighted_deviation_norm(rec, alpha, 0.0, rt, QuadOrders{32, 24, 48, 24, 48});
  // zero fields: the deviation is exactly -s_min, a radial closed form
  const ChargeDensity& rho = rec.scenario.rho;
  const double grad_sq = kFourPi * oracles::integrate(
      [&](double r) {
        const double g = rho.coulomb_grad(r);
        return std::pow(1.0 + r, -2.0 * alpha) * g * g * r * r;
      },
      0.0, rt, 1e-14);
  const double want = std::sqrt(grad_sq) + norm(rec.config.q0) + norm(rec.config.p0);
  CHECK(wn.total == doctest::Approx(want).epsilon(1e-4));
  CHECK(wn.tail_bound < 0.02);
}

TEST_CASE("decay fit: synthetic power law") {
  DiagnosticSeries s;
  s.name = "synthetic";
  for (int i = 1; i <= 200; ++i) {
    const double t = 0.5 * i;
    s.push(t, 3.0 * std::pow(t, -2.0));
  }
  const DecayFit fit = decay_fit(s, 5.0, 90.0, 1.5, 0.25);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.residual < 1e-10);
  CHECK(fit.upper_bound_consistent);
}

TEST_CASE("decay fit: exponential dominates any polynomial rate") {
  DiagnosticSeries s;
  for (int i = 0; i <= 400; ++i) {
    const double t = 10.0 + 0.1 * i;
    s.push(t, 2.0 * std::exp(-t));
  }
  const DecayFit fit = decay_fit(s, 10.0, 50.0, 5.0, 0.25);
  CHECK(fit.exponent > 5.0);
  CHECK(fit.upper_bound_consistent);
}

TEST_CASE("decay fit guards its window") {
  DiagnosticSeries s;
  for (int i = 1; i <= 5; ++i) s.push(i, 1.0 / i);
  CHECK_THROWS_AS(decay_fit(s, 1.0, 5.0, 1.0, 0.25), std::runtime_error);
  DiagnosticSeries f;
  for (int i = 1; i <= 40; ++i) f.push(i, 1e-14);  // everything below floor
  CHECK_THROWS_AS(decay_fit(f, 1.0, 40.0, 1.0, 0.25), std::runtime_error);
  CHECK_THROWS_AS(decay_fit(s, -1.0, 5.0, 1.0, 0.25), std::invalid_argument);
}

TEST_CASE("envelope series keeps window maxima") {
  DiagnosticSeries s;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.01 * i;
    s.push(t, std::fabs(std::sin(5.0 * t)) * std::exp(-0.1 * t));
  }
  const DiagnosticSeries env = envelope_series(s, 2.0);
  REQUIRE(env.size() >= 4);
  for (std::size_t i = 1; i < env.size(); ++i) CHECK(env.values[i] < env.values[i - 1]);
  CHECK(env.values.front() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("scattering remainder: stationary run is identically zero") {
  const ScatteringRemainder sr = scattering_remainder(stationary_run(), 1.5);
  for (double v : sr.source_norm.values) CHECK(v < 1e-12);
  for (double v : sr.bound.values) CHECK(v < 1e-9);
}

TEST_CASE("scattering remainder: small displacements follow the taylor oracle") {
  const ChargeDensity rho = charge_catalog("bump");
  const double d = 0.01;
  const double got = std::sqrt(2.0 * (rho.autocorrelation(0.0) - rho.autocorrelation(d)));
  const double grad_l2 = std::sqrt(kFourPi * oracles::integrate(
      [&](double r) { return r * r * rho.drho(r) * rho.drho(r); }, 0.0, 1.0, 1e-14));
  const double want = d * grad_l2 / std::sqrt(3.0);
  CHECK(got == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("scattering remainder refuses unconverged runs") {
  ScenarioConfig cfg;
  cfg.rho_kind = "zero";  // no damping at all
  cfg.potential_kind = "harmonic";
  cfg.q0 = Vec3{1.0, 0.0, 0.0};
  cfg.field_kind = "zero";
  cfg.horizon = 20.0;
  cfg.step = 0.02;
  const SimulationRecord rec = simulate(cfg);
  CHECK_THROWS_AS(scattering_remainder(rec, 1.5), std::runtime_error);
}

}  // TEST_SUITE

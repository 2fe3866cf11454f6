// Microbenchmarks for the hot kernels: the collapsed pair force, point field
// evaluation, far-field amplitude, and a full integrator step.

#include <benchmark/benchmark.h>

#include "wavetrap/dynamics.hpp"
#include "wavetrap/retarded_field.hpp"

namespace {

using namespace wavetrap;

const ChargeDensity& bump() {
  static ChargeDensity rho = charge_catalog("bump");
  return rho;
}

const SimulationRecord& run() {
  static SimulationRecord rec = [] {
    ScenarioConfig cfg;
    cfg.rho_kind = "bump";
    cfg.potential_kind = "harmonic";
    cfg.q0 = Vec3{1.0, 0.0, 0.0};
    cfg.horizon = 20.0;
    cfg.step = 0.02;
    return simulate(cfg);
  }();
  return rec;
}

void BM_PairForce(benchmark::State& state) {
  const ChargeDensity& rho = bump();  // build the tables outside the timing loop
  const Vec3 c{0.3, 0.1, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(rho.pair_force(c, 0.8));
}
BENCHMARK(BM_PairForce);

void BM_SelfForce(benchmark::State& state) {
  const SimulationRecord& rec = run();
  const HistoryView view = rec.view();
  const SelfForce force(rec.scenario, view, rec.config.panel_order, rec.config.quad);
  const Kin k = view.state(18.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(force.eval(k.q, 18.0, rec.scenario.potential));
}
BENCHMARK(BM_SelfForce);

void BM_LwFieldPoint(benchmark::State& state) {
  const SimulationRecord& rec = run();
  const HistoryView view = rec.view();
  const RetardedField rf(bump(), view);
  for (auto _ : state) benchmark::DoNotOptimize(rf.lw_field(Vec3{2.0, 1.0, 0.5}, 18.0));
}
BENCHMARK(BM_LwFieldPoint);

void BM_FarfieldAmplitude(benchmark::State& state) {
  const SimulationRecord& rec = run();
  const HistoryView view = rec.view();
  const Vec3 om{0.6, 0.0, 0.8};
  for (auto _ : state)
    benchmark::DoNotOptimize(farfield_amplitude(bump(), view, om, 10.0));
}
BENCHMARK(BM_FarfieldAmplitude);

void BM_Rk4Step(benchmark::State& state) {
  const SimulationRecord& rec = run();
  for (auto _ : state) {
    state.PauseTiming();
    TrajectoryHistory hist(rec.step());
    for (std::size_t i = 0; i < rec.history.size(); ++i)
      hist.append(rec.history.knot_q(i), rec.history.knot_v(i), rec.history.knot_a(i));
    Vec3 q = hist.knot_q(hist.size() - 1), p = hist.knot_v(hist.size() - 1);
    state.ResumeTiming();
    rk4_step(rec.scenario, hist, q, p, hist.end_time(), rec.step(), rec.config.panel_order,
             rec.config.quad, nullptr);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_Rk4Step);

}  // namespace

BENCHMARK_MAIN();

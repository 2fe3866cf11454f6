#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavetrap/charge_density.hpp"
#include "wavetrap/initial_field.hpp"
#include "wavetrap/potential.hpp"
#include "wavetrap/quadrature.hpp"
#include "wavetrap/retarded_field.hpp"
#include "wavetrap/trajectory.hpp"

namespace wavetrap {

/// Full description of a coupled run, as parsed from a config file.
struct ScenarioConfig {
  std::string rho_kind = "bump";
  std::map<std::string, double> rho_params;
  std::string potential_kind = "harmonic";
  std::map<std::string, double> potential_params;
  Vec3 q0{}, p0{};
  std::string field_kind = "zero";
  std::map<std::string, double> field_params;
  double step = 0.0;            // 0 -> 0.02 * R_rho
  double horizon = 100.0;
  bool plane_mode = true;
  double plane_tol = 1e-9;
  double escape_radius = 0.0;   // 0 -> 10 |q0| + 10
  QuadOrders quad;
  int panel_order = 5;
  unsigned seed = 0;

  double effective_step(double r_rho) const { return step > 0.0 ? step : 0.02 * r_rho; }
  double effective_escape(double q0_norm) const {
    return escape_radius > 0.0 ? escape_radius : 10.0 * q0_norm + 10.0;
  }
};

/// Assembled catalog objects for a scenario. `ref_center` is set for matched
/// starts: the field is then evolved as (static reference) + (difference
/// source) + free evolution of `deviation_field` (the data minus the
/// reference's Coulomb part), so the stationary state is an exact fixed point
/// of the force. `field` always holds the full initial data for field_eval.
struct Scenario {
  ChargeDensity rho;
  ConfiningPotential potential;
  FieldInitialData field;
  FieldInitialData deviation_field;
  std::optional<Vec3> ref_center;
};

Scenario build_scenario(const ScenarioConfig& cfg);

struct ForceParts {
  Vec3 potential{};   // -grad V
  Vec3 self{};        // field force from the retarded (and static reference) part
  Vec3 kirchhoff{};   // field force from the free evolution of the initial data
  Vec3 total() const { return potential + self + kirchhoff; }
};

/// Field force on the particle through the collapsed pair kernels: a 1D
/// retarded-radius quadrature plus the static two-center force for matched
/// references and a ball quadrature against the free data part.
class SelfForce {
 public:
  SelfForce(const Scenario& sc, const HistoryView& view, int panel_order, const QuadOrders& quad);

  ForceParts eval(const Vec3& q, double t, const ConfiningPotential& V) const;

  /// Contract route: integrate field_eval against grad rho over the support
  /// ball. Slow; for cross-checks.
  Vec3 quadrature_route(const Vec3& q, double t) const;

 private:
  const Scenario* sc_;
  const HistoryView* view_;
  int order_;
  QuadOrders quad_;
};

/// Field force on the particle at q: int phi(x,t) grad rho(x - q) dx over the
/// support ball, phi from field_eval. This is the reference route; the
/// integrator uses the collapsed kernels through SelfForce.
Vec3 self_force(const ChargeDensity& rho, const HistoryView& view, const FieldInitialData& d,
                const Vec3& q, double t, const QuadOrders& quad = {}, int panel_order = 5);

struct SimulationRecord {
  ScenarioConfig config;
  Scenario scenario;
  TrajectoryHistory history;
  std::vector<ForceParts> forces;  // one per knot
  double wall_seconds = 0.0;
  double theta = 0.0;              // cone threshold for the recorded speed bound
  double theta_eps = 0.01;

  double step() const { return history.step(); }
  HistoryView view() const { return HistoryView(history); }
};

/// Integrate the coupled delay system with classical RK4; the history is
/// provisionally extended with stage data inside each step. Aborts on escape
/// from the configured radius or nonfinite state; plane scenarios assert
/// |q3| + |p3| < plane_tol at every knot.
SimulationRecord simulate(const ScenarioConfig& cfg);

/// Single RK4 step used by simulate; exposed for step-level tests.
void rk4_step(const Scenario& sc, TrajectoryHistory& hist, Vec3& q, Vec3& p, double t, double dt,
              int panel_order, const QuadOrders& quad, ForceParts* parts_out);

/// Deviation state for the nonlinear remainder: field deviation psi and
/// particle displacement q (momenta do not enter B).
struct DeviationState {
  std::function<double(const Vec3&)> psi;
  Vec3 q{};
};

struct RemainderValue {
  std::function<double(const Vec3&)> field_component;  // rho(x) - rho(x-q) - grad rho . q
  double field_l2 = 0.0;
  Vec3 particle_component{};
  double norm() const { return field_l2 + wavetrap::norm(particle_component); }
};

/// Quadratic part B(X) of the dynamics split at the stationary state.
RemainderValue nonlinear_remainder(const ChargeDensity& rho, const ConfiningPotential& V,
                                   double nu0_sq, const DeviationState& X,
                                   const QuadOrders& quad = {});

}  // namespace wavetrap

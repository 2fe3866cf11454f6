#pragma once

#include <functional>
#include <optional>

#include "wavetrap/charge_density.hpp"
#include "wavetrap/initial_field.hpp"
#include "wavetrap/quadrature.hpp"
#include "wavetrap/trajectory.hpp"

namespace wavetrap {

/// Snapshot of the linearized state with the field given through callables.
struct LinearStateFn {
  std::function<double(const Vec3&)> psi, lap_psi, pi;
  Vec3 Q{}, P{};
};

struct LinearRhs {
  std::function<double(const Vec3&)> dpsi, dpi;
  Vec3 dQ{}, dP{};
};

/// Generator of the linearized dynamics at the stationary state:
/// (psi, pi, Q, P) -> (pi, lap psi + grad rho . Q, P, -(nu0^2+nu1^2) Q + int psi grad rho).
LinearRhs linear_apply_A(const ChargeDensity& rho, double nu0_sq, const LinearStateFn& z,
                         const QuadOrders& quad = {});

struct LinearConfig {
  double nu0_sq = 1.0;
  Vec3 Q0{}, P0{};
  std::string field_kind = "zero";
  std::map<std::string, double> field_params;
  std::optional<FieldInitialData> data_override;  // bypasses the catalog lookup
  double step = 0.02;
  double horizon = 100.0;
  int panel_order = 5;
  QuadOrders quad;
};

/// Completed linearized run. The linear field is fully determined by the
/// particle history (its retarded source is grad rho . Q(tau) at the origin)
/// plus the free evolution of the initial field data, so only (Q, P, Qdot')
/// knots are stored.
struct LinearRecord {
  ChargeDensity rho;
  LinearConfig config;
  FieldInitialData data;
  TrajectoryHistory history;
  double nu1_sq = 0.0;
  double wall_seconds = 0.0;
};

/// Integrate the linearized system. The field force on the particle reduces
/// exactly to the scalar memory kernel lambda(r) of the density; the data part
/// enters through a ball quadrature against grad rho.
LinearRecord linear_simulate(const ChargeDensity& rho, const LinearConfig& cfg);

/// Linear field at a point: psi = xhat . Lambda(|x|, t) + free part, with
/// Lambda the retarded dipole amplitude of the source history.
struct LinearFieldSample {
  double psi = 0.0, pi = 0.0;
  Vec3 grad_psi{};
};
LinearFieldSample linear_field_eval(const LinearRecord& rec, const Vec3& x, double t);

/// Quadratic invariant of the linear flow, evaluated on the ball B_RE. For
/// runs with zero initial field data and R_E >= t + R_rho the truncation tail
/// is exactly zero (nothing has propagated past the light cone) and the field
/// integrals reduce to 1D radial quadratures of the dipole amplitude.
struct LinearEnergy {
  double total = 0.0;
  double particle = 0.0;   // P^2/2 + (nu0^2+nu1^2) Q^2/2
  double field = 0.0;      // (|Pi|^2 + |grad Psi|^2)/2 on B_RE
  double coupling = 0.0;   // - int Psi grad rho . Q
  double tail_bound = 0.0; // bound on the part outside B_RE
  double radius = 0.0;
};
LinearEnergy linear_energy(const LinearRecord& rec, double t, double r_trunc,
                           double panel_width = 0.25);

/// Grid-based evaluation of the same functional; works for arbitrary initial
/// data at ball-rule cost.
LinearEnergy linear_energy_grid(const LinearRecord& rec, double t, double r_trunc,
                                const QuadOrders& quad = {});

}  // namespace wavetrap

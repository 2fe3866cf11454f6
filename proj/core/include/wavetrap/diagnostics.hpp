#pragma once

#include <map>
#include <string>
#include <vector>

#include "wavetrap/dynamics.hpp"

namespace wavetrap {

/// Tagged time series with the provenance metadata every emitted number
/// carries (truncation radii, quadrature orders, step, tolerances).
struct DiagnosticSeries {
  std::string name;
  std::vector<double> times;
  std::vector<double> values;
  std::map<std::string, double> meta;

  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
  std::size_t size() const { return times.size(); }
};

/// Local energy in the ball B_R at time t: field density inside the ball plus
/// the particle and coupling terms.
double local_energy(const SimulationRecord& rec, double R, double t, const QuadOrders& quad,
                    int field_order = 3);

struct FluxBalance {
  double h_start = 0.0, h_end = 0.0;
  double delta_h = 0.0;    // H_R(t0) - H_R(t1), the energy that left the ball
  double flux_out = 0.0;   // - int dt oint omega . pi grad phi
  double mismatch = 0.0;   // |delta_h - flux_out|
};

/// Energy bookkeeping over [R + T0, R + T1]: compares the drop of H_R with the
/// outgoing boundary flux through S_R.
FluxBalance flux_balance(const SimulationRecord& rec, double R, double T0, double T1,
                         const QuadOrders& quad, int time_order = 4, double time_panel = 0.25,
                         int field_order = 3);

/// Cumulative radiated energy int_t0^T dt int_{S1} |pibar|^2 d omega as a
/// series over T in [t0, t1]; t0 defaults into the covered window.
DiagnosticSeries radiation_functional(const SimulationRecord& rec, double t0, double t1, double dt,
                                      int sphere_mu = 12, int sphere_phi = 24, int field_order = 3);

/// Emission-time kernel of the convolution representation on the cone:
/// g_omega(theta) = rdotdot / (1 - rdot)^3 at tau(theta), theta = tau - omega.q(tau).
double g_omega(const SimulationRecord& rec, const Vec3& omega, double theta);

struct ConvolutionCheck {
  double lhs = 0.0;   // (rho_a * g_omega)(t), normalized like the amplitude
  double rhs = 0.0;   // farfield_amplitude(omega, t)
  double diff = 0.0;
};
ConvolutionCheck convolution_check(const SimulationRecord& rec, const Vec3& omega, double t);

struct RelaxationSeries {
  DiagnosticSeries speed;  // |qdot| at the knots
  DiagnosticSeries accel;  // |qdotdot| at the knots
  double peak_speed = 0.0;
  double early_envelope = 0.0;  // max over the leading window
  double late_envelope = 0.0;   // max over the trailing window
  double envelope_ratio = 0.0;  // late / early
};
RelaxationSeries relaxation_series(const SimulationRecord& rec, double early_frac = 0.25,
                                   double late_frac = 0.25);

/// Envelope of an oscillating series: running max over trailing windows.
DiagnosticSeries envelope_series(const DiagnosticSeries& s, double window);

/// Weighted deviation norm from the stationary state at the potential minimum:
/// ||(1+|x|)^-alpha grad(phi - s_min)||_{L2(B_R)} + ||(1+|x|)^-alpha pi|| +
/// |q - q_min| + |p|, with an analytic bound on the truncated Coulomb tail.
struct WeightedNorm {
  double total = 0.0;
  double field_grad = 0.0, field_pi = 0.0, particle = 0.0;
  double tail_bound = 0.0;
  double r_trunc = 0.0;
};
WeightedNorm weighted_deviation_norm(const SimulationRecord& rec, double alpha, double t,
                                     double r_trunc, const QuadOrders& quad, int field_order = 3);

struct DecayFit {
  double t_min = 0.0, t_max = 0.0;
  double exponent = 0.0;   // fitted beta in value ~ t^-beta
  double residual = 0.0;   // rms residual of the log-log fit
  int points = 0;
  double alpha_target = 0.0, eps_tol = 0.0;
  bool upper_bound_consistent = false;  // beta >= alpha_target - eps_tol
};

/// Least-squares slope of log(value) against log(t) on [t_min, t_max]; values
/// below the 1e-12 floor are excluded. Throws with fewer than 8 usable points.
DecayFit decay_fit(const DiagnosticSeries& series, double t_min, double t_max,
                   double alpha_target, double eps_tol);

struct ScatteringRemainder {
  DiagnosticSeries source_norm;  // ||rho(.-q+) - rho(.-q(s))||_{L2} per knot
  DiagnosticSeries bound;        // tail bound on ||r1(t)||
  double tail_extrapolation = 0.0;
  double fitted_exponent = 0.0;
};

/// Duhamel remainder bound of the scattering asymptotics. Requires the run to
/// have relaxed toward the minimum (trailing speed envelope below
/// `converged_tol`), else throws.
ScatteringRemainder scattering_remainder(const SimulationRecord& rec, double alpha,
                                         double converged_tol = 0.05);

}  // namespace wavetrap

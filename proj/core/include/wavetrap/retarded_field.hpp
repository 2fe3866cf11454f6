#pragma once

#include "wavetrap/charge_density.hpp"
#include "wavetrap/initial_field.hpp"
#include "wavetrap/trajectory.hpp"

namespace wavetrap {

/// Point values of the field split into its retarded and free parts.
struct FieldSample {
  double phi = 0.0, pi = 0.0;
  Vec3 grad_phi{};
  double phi_r = 0.0, pi_r = 0.0;
  Vec3 grad_phi_r{};
  double phi_k = 0.0, pi_k = 0.0;
  Vec3 grad_phi_k{};
};

struct LwSample {
  double phi = 0.0, pi = 0.0;
  Vec3 grad_phi{};
};

enum class FarfieldRoute { Collapsed1D, General3D };

/// Retarded part of the field generated by rho dragged along the recorded
/// trajectory, with zero initial data. The radial symmetry of rho collapses
/// the angular integrals into the density's spherical-mean kernels, so every
/// evaluation is a 1D quadrature over the retarded radius aligned with the
/// history knots. pi_r is the literal time derivative of phi_r including the
/// switch-on boundary term at the light cone of t = 0.
class RetardedField {
 public:
  RetardedField(const ChargeDensity& rho, const HistoryView& view, int panel_order = 5)
      : rho_(&rho), view_(&view), order_(panel_order) {}

  LwSample lw_field(const Vec3& x, double t) const;

  /// Reference route: product Gauss quadrature in spherical coordinates
  /// centered at x over the retarded ball. Slow; used for cross-checks.
  LwSample lw_field_quadrature(const Vec3& x, double t) const;

  /// Outer radius of the source support seen by the history.
  double source_bound() const { return view_->radius_bound() + rho_->support_radius(); }

  const ChargeDensity& rho() const { return *rho_; }
  const HistoryView& view() const { return *view_; }

 private:
  const ChargeDensity* rho_;
  const HistoryView* view_;
  int order_;
};

/// Total field = retarded part + free evolution of the initial data.
FieldSample field_eval(const ChargeDensity& rho, const HistoryView& view,
                       const FieldInitialData& data, const Vec3& x, double t,
                       int panel_order = 5);

/// Cone half-angle bound: directions with |omega_3| >= Theta keep
/// |omega . qdot| < 1 even for superluminal planar motion.
double theta_threshold(double speed_bound, double eps);

/// Far-field amplitude: the wave-zone limit of |x| * pi_r(x, |x| + t). The
/// general route integrates grad(rho) . qdot over the source ball at the
/// sliced retarded time tau = t + omega . y; valid for every direction.
double farfield_amplitude(const ChargeDensity& rho, const HistoryView& view, const Vec3& omega,
                          double t, FarfieldRoute route = FarfieldRoute::Collapsed1D,
                          int panel_order = 5);

/// Equivalent amplitude on the cone |omega_3| >= Theta, obtained by parts from
/// the general formula; the (1 - omega . qdot) denominators stay away from 0
/// there. Throws off the cone. `denom_min` (optional) receives the smallest
/// denominator met by the quadrature.
double farfield_amplitude_cone(const ChargeDensity& rho, const HistoryView& view,
                               const Vec3& omega, double t,
                               FarfieldRoute route = FarfieldRoute::Collapsed1D,
                               double eps = 0.01, double* denom_min = nullptr,
                               int panel_order = 5);

}  // namespace wavetrap

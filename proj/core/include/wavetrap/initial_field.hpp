#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wavetrap/charge_density.hpp"
#include "wavetrap/math.hpp"
#include "wavetrap/quadrature.hpp"

namespace wavetrap {

/// One radially symmetric component of the initial field, centered at
/// `center`: phi-part profile u0 and pi-part profile v0 with derivatives.
/// Radial free waves evolve in closed form (d'Alembert on r*u), which is the
/// fast route for everything the integrator touches.
struct RadialPulse {
  Vec3 center{};
  std::function<double(double)> u0, du0, d2u0;  // phi0 profile
  std::function<double(double)> v0, dv0;        // pi0 profile
  std::function<double(double)> iv;             // int_0^s sigma v0(sigma) dsigma
  double iv_total = 0.0;
  double support = 0.0;  // infinity() for Coulomb-type profiles
};

/// Spatial decay class of the data: either compact support or a power tail.
struct DecayClass {
  double compact_radius = 0.0;          // 0 when not compactly supported
  double sigma = std::numeric_limits<double>::infinity();  // power of the gradient tail
};

/// Initial field data (phi0, pi0) with analytic first/second derivatives.
/// The callables are the general evaluation surface; `pulses` carries the
/// radial decomposition used by the exact evolution route (empty for data
/// assembled from bare callables).
struct FieldInitialData {
  std::function<double(const Vec3&)> phi0, pi0;
  std::function<Vec3(const Vec3&)> grad_phi0, grad_pi0;
  std::function<Mat3(const Vec3&)> hess_phi0;
  std::vector<RadialPulse> pulses;
  DecayClass decay;
  bool plane_symmetric = true;
  std::string name = "zero";
  std::map<std::string, double> params;

  bool is_zero() const { return pulses.empty() && !phi0; }
};

struct KirchhoffSample {
  double phi = 0.0;
  double pi = 0.0;
  Vec3 grad_phi{};
};

/// Free-wave evolution of the data by spherical means (product Gauss on S^2).
/// Requires t > 0 and the analytic derivative callables.
KirchhoffSample kirchhoff_field(const FieldInitialData& d, const Vec3& x, double t,
                                int nmu = 24, int nphi = 48);

/// Exact free-wave evolution of the radial components; identical value as the
/// quadrature route, at O(1) cost. Valid for all t >= 0.
KirchhoffSample kirchhoff_field_exact(const FieldInitialData& d, const Vec3& x, double t);

/// Catalog:
///   "zero"                          no field
///   "matched"  (center1..3)         phi0 = s_center, pi0 = 0  (needs rho)
///   "matched_difference" (center1..3, ref1..3)   s_center - s_ref  (needs rho)
///   "pulse"    (center1..3, radius, phi_amp, pi_amp)   C^inf bump data
///   "plateau"  (center1..3, radius, pi_amp, edge)      flat pi0 core with
///                                                      smooth edge, phi0 = 0
///   "matched_plus_pulse" (center1..3, pulse_center1..3, pulse_radius,
///                         pulse_phi_amp, pulse_pi_amp)  matched + bump data
FieldInitialData field_catalog(const std::string& key,
                               const std::map<std::string, double>& params,
                               const ChargeDensity* rho = nullptr);

/// Assemble data from explicit radial components (callables included).
FieldInitialData field_from_pulses(std::vector<RadialPulse> pulses, DecayClass decay = {});

/// Deviation data phi0 = s_{c1} - s_{c0}, pi0 = 0 (two matched components of
/// opposite sign); the natural linearization input for displaced starts.
FieldInitialData matched_difference_field(const ChargeDensity& rho, const Vec3& c1, const Vec3& c0);

}  // namespace wavetrap

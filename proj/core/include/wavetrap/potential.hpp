#pragma once

#include <functional>
#include <map>
#include <string>

#include "wavetrap/math.hpp"

namespace wavetrap {

/// Confining external potential with analytic derivatives. The designated
/// minimum must be a critical point with isotropic Hessian nu0^2 * I, and the
/// potential must be even in x3 across the plane x3 = 0 so planar scenarios
/// stay planar.
struct ConfiningPotential {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
  Vec3 minimum{};
  double nu0_sq = 1.0;
  std::string name = "custom";
  std::map<std::string, double> params;

  /// Spot-checks the structural assumptions (critical point, isotropy, plane
  /// symmetry, confinement at sample radii); throws on violation.
  void validate() const;
};

/// Catalog: "harmonic" (nu0) and "quartic" (nu0, lambda), both centered at the
/// origin.
ConfiningPotential potential_catalog(const std::string& key,
                                     const std::map<std::string, double>& params = {});

/// Energy of a stationary state: V(q) + self-energy/2 (field term of the
/// rewritten Hamiltonian vanishes there).
double stationary_energy(const class ChargeDensity& rho, const ConfiningPotential& V, const Vec3& q);

}  // namespace wavetrap

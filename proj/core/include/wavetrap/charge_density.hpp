#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "wavetrap/math.hpp"
#include "wavetrap/quadrature.hpp"

namespace wavetrap {

/// Closed-form radial profile of a coupling density. `d2f` is optional; when
/// absent it is replaced by a central difference of `df` (only the small-
/// argument kernel branches consume it).
struct ChargeProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::optional<std::function<double(double)>> d2f;
  double support = 1.0;
  bool smooth_edge = true;  // vanishes with all derivatives at the support edge
  std::vector<double> breakpoints;  // interior discontinuities of f
  std::string name = "custom";
  std::map<std::string, double> params;
};

/// Radial, compactly supported coupling density rho(x) = rho_r(|x|).
///
/// Everything the rest of the code needs from rho is reduced at construction
/// to 1D cumulative tables:
///   J1(s) = int_0^s u rho_r du          J2(s) = int_0^s u^2 rho_r du
///   C(d)  = int rho(x) rho(x+d e) dx    (autocorrelation, radial)
///   P1(s) = int_0^s u C du              P2(s) = int_0^s u^2 C du
/// which give closed forms for the Newtonian field s0 (Laplace s0 = rho),
/// spherical means of rho, the two-center interaction and its force, and the
/// memory kernel of the linearized dynamics. These kernels are what turn the
/// retarded field integrals into cheap radial quadratures.
class ChargeDensity {
 public:
  ChargeDensity(ChargeProfile profile, QuadOrders orders = {}, int table_n = 2048,
                bool enforce_smooth_edge = true);

  double support_radius() const { return radius_; }
  double total_charge() const { return charge_; }
  double l2_norm_sq() const { return l2_sq_; }
  double self_energy() const { return self_energy_; }       // <rho, Lap^-1 rho> <= 0
  double nu1_sq() const { return l2_sq_ / 3.0; }
  bool smooth_edge() const { return profile_.smooth_edge; }
  const std::vector<double>& breakpoints() const { return profile_.breakpoints; }
  bool is_zero() const { return charge_ == 0.0 && l2_sq_ == 0.0; }
  const std::string& name() const { return profile_.name; }
  const std::map<std::string, double>& params() const { return profile_.params; }
  const QuadOrders& orders() const { return orders_; }

  double rho(double r) const { return r < radius_ ? profile_.f(r) : 0.0; }
  double drho(double r) const { return r < radius_ ? profile_.df(r) : 0.0; }
  double rho3(const Vec3& x) const { return rho(norm(x)); }
  Vec3 grad_rho3(const Vec3& x) const;

  /// Newtonian potential s0 with Lap s0 = rho; exterior is exactly -Q/(4 pi r).
  double coulomb(double r) const;
  double coulomb_grad(double r) const;   // s0'(r) = (enclosed charge)/(4 pi r^2)
  double coulomb_grad2(double r) const;  // s0'' = rho - 2 s0'/r
  double coulomb3(const Vec3& x, const Vec3& center = {}) const { return coulomb(norm(x - center)); }

  /// Spherical mean kernel K(a,r) = int_{S^2} rho_r(|a e + r n|) d^2 n and its
  /// radial derivatives in `a`. Supported on |a - r| < R.
  double sphere_mean(double a, double r) const;
  double sphere_mean_da(double a, double r) const;
  double sphere_mean_daa(double a, double r) const;

  /// K and K_a together, sharing the table lookups (the field evaluators call
  /// this once per quadrature node).
  struct KernelPair {
    double k = 0.0, ka = 0.0;
  };
  KernelPair sphere_mean_pair(double a, double r) const;

  /// Pair kernel S(a,r) = int rho(u) K(|u + a e|, r) du (built on C instead of
  /// rho), supported on |a - r| < 2R, and the associated force direction-safe
  /// evaluator S_a(|c|,r) * c/|c|.
  double pair_kernel(double a, double r) const;
  double pair_kernel_da(double a, double r) const;
  Vec3 pair_force(const Vec3& c, double r) const;

  /// Static two-center interaction U(a) = int rho(u) s0(|u + a e|) du and its
  /// radial force U'(a); U(a) = -Q^2/(4 pi a) outside the double support.
  double two_center_energy(double a) const;
  double two_center_force(double a) const;

  double autocorrelation(double d) const;  // C(d), C(0) = ||rho||^2

  /// Memory kernel of the linearized particle equation:
  /// int Psi_r grad rho dx = int_0^t lambda(r) Q(t-r) dr, supported r < 2R.
  double memory_kernel(double r) const;

  /// Axial marginal rho_a(s) = 2 pi int_{|s|}^R u rho_r du and its derivative.
  double axial_marginal(double s) const;
  double axial_marginal_d(double s) const;

 private:
  // hot-path copies of s rho(s) and u C(u) as tables so the kernels never call
  // the profile closures inside quadrature loops
  double j1c(double s) const { return s < radius_ ? J1d_.eval(s) : 0.0; }
  double dj1c(double s) const { return s < radius_ ? J1d_.deriv(s) : 0.0; }
  double c1c(double u) const { return u < 2.0 * radius_ && u > 0.0 ? C1_.eval(u) : 0.0; }

  ChargeProfile profile_;
  QuadOrders orders_;
  double radius_ = 1.0;
  double charge_ = 0.0;
  double l2_sq_ = 0.0;
  double self_energy_ = 0.0;
  double small_ = 1e-9;
  CubicTable J1_, J2_, C_, P1_, P2_, lambda_, J1d_, C1_;
};

/// Factory matching the construction contract: rejects nonpositive support and
/// profiles that fail to vanish at the support edge (tolerance 1e-12).
ChargeDensity make_charge_density(std::function<double(double)> profile,
                                  std::function<double(double)> gradient_profile,
                                  double support_radius, QuadOrders orders = {});

/// Catalog entries addressable from config files: "bump", "uniform_ball",
/// "shell", "zero". Parameters: radius, charge, width (shell only).
ChargeDensity charge_catalog(const std::string& key,
                             const std::map<std::string, double>& params = {},
                             QuadOrders orders = {});

/// Stationary state: particle frozen at a critical point of V with its
/// comoving Newtonian field.
struct StationaryState {
  Vec3 center;
  std::function<double(const Vec3&)> coulomb_field;
};

StationaryState stationary_state(const ChargeDensity& rho, const Vec3& center);

}  // namespace wavetrap

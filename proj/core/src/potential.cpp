#include "wavetrap/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "wavetrap/charge_density.hpp"

namespace wavetrap {

void ConfiningPotential::validate() const {
  const Vec3 g = gradient(minimum);
  if (norm(g) > 1e-10) throw std::invalid_argument("potential: gradient does not vanish at the minimum");
  const Mat3 H = hessian(minimum);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = (i == j) ? nu0_sq : 0.0;
      if (std::fabs(H(i, j) - want) > 1e-9 * std::max(1.0, nu0_sq))
        throw std::invalid_argument("potential: Hessian at the minimum is not isotropic nu0^2 I");
    }
  // plane symmetry: d/dx3 V = 0 on x3 = 0
  for (int i = 0; i < 100; ++i) {
    const double a = 0.13 * i, b = 0.41 * i - 6.0;
    const Vec3 p{std::sin(a) * (1.0 + 0.2 * i), std::cos(b) * (1.0 + 0.15 * i), 0.0};
    if (std::fabs(gradient(p).z) > 1e-10 * (1.0 + norm(gradient(p))))
      throw std::invalid_argument("potential: not plane-symmetric (grad_3 V nonzero on x3=0)");
  }
  // confinement spot check
  const double vmin = value(minimum);
  double prev = vmin;
  for (double r = 4.0; r <= 64.0; r *= 2.0) {
    const double v = value(minimum + Vec3{r, 0.3 * r, 0.0});
    if (v <= prev) throw std::invalid_argument("potential: not confining at sample radii");
    prev = v;
  }
}

ConfiningPotential potential_catalog(const std::string& key,
                                     const std::map<std::string, double>& params) {
  auto get = [&](const std::string& k, double fallback) {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  };
  const double nu0 = get("nu0", 1.0);
  if (nu0 <= 0.0) throw std::invalid_argument("potential_catalog: nu0 must be positive");
  const double nu0sq = nu0 * nu0;

  ConfiningPotential V;
  V.name = key;
  V.params = params;
  V.params["nu0"] = nu0;
  V.minimum = Vec3{};
  V.nu0_sq = nu0sq;

  if (key == "harmonic") {
    V.value = [nu0sq](const Vec3& q) { return 0.5 * nu0sq * dot(q, q); };
    V.gradient = [nu0sq](const Vec3& q) { return nu0sq * q; };
    V.hessian = [nu0sq](const Vec3&) { return identity_times(nu0sq); };
    return V;
  }
  if (key == "quartic") {
    const double lam = get("lambda", 0.25);
    if (lam < 0.0) throw std::invalid_argument("potential_catalog: lambda must be >= 0");
    V.params["lambda"] = lam;
    V.value = [nu0sq, lam](const Vec3& q) {
      const double r2 = dot(q, q);
      return 0.5 * nu0sq * r2 + 0.25 * lam * r2 * r2;
    };
    V.gradient = [nu0sq, lam](const Vec3& q) { return (nu0sq + lam * dot(q, q)) * q; };
    V.hessian = [nu0sq, lam](const Vec3& q) {
      Mat3 H = identity_times(nu0sq + lam * dot(q, q));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) += 2.0 * lam * q[i] * q[j];
      return H;
    };
    return V;
  }
  throw std::invalid_argument("potential_catalog: unknown potential '" + key + "'");
}

double stationary_energy(const ChargeDensity& rho, const ConfiningPotential& V, const Vec3& q) {
  return V.value(q) + 0.5 * rho.self_energy();
}

}  // namespace wavetrap

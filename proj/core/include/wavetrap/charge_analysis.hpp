#pragma once

#include <string>

#include "wavetrap/charge_density.hpp"

namespace wavetrap {

/// Result of scanning |rho_hat| for zeros on [0, k_max].
struct WienerReport {
  double k_max = 0.0;
  int samples = 0;
  double min_abs = 0.0;
  double argmin = 0.0;
  double threshold = 0.0;
  bool verdict = false;  // pass iff min_abs > threshold
  double envelope_last_decade = 0.0;  // max |rho_hat| over the top 10% of the range
  std::string to_json() const;
};

/// 3D Fourier transform of the radial density, real by symmetry:
/// rho_hat(k) = (4 pi / k) int_0^R r sin(kr) rho_r(r) dr, rho_hat(0) = Q.
double fourier_radial(const ChargeDensity& rho, double k);

/// 1D transform of the axial marginal; equals fourier_radial for radial
/// densities and is used as a cross-check inside the scan.
double fourier_axial_marginal(const ChargeDensity& rho, double k);

/// Grid scan of |rho_hat| on [0, k_max] with golden-section refinement of
/// bracketed local minima. Ties in the refined minima resolve to the smallest
/// k. Throws if the marginal-transform identity fails beyond 1e-6 at the
/// sampled cross-check wavenumbers (an implementation bug, not physics).
WienerReport wiener_scan(const ChargeDensity& rho, double k_max, int samples, double threshold);

/// Scan with module defaults: k_max = 20 * 2 pi / R, threshold = 1e-4 * |Q|.
WienerReport wiener_scan_default(const ChargeDensity& rho);

}  // namespace wavetrap

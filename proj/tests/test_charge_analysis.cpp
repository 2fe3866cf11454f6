#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wavetrap/charge_analysis.hpp"

using namespace wavetrap;

namespace {
const ChargeDensity& bump() {
  static ChargeDensity rho = charge_catalog("bump");
  return rho;
}
const ChargeDensity& shell() {
  static ChargeDensity rho = charge_catalog("shell");
  return rho;
}
}  // namespace

TEST_SUITE("charge_analysis") {

TEST_CASE("transform at k = 0 is the total charge") {
  CHECK(fourier_radial(bump(), 0.0) == doctest::Approx(bump().total_charge()));
  CHECK_THROWS_AS(fourier_radial(bump(), -1.0), std::invalid_argument);
}

TEST_CASE("thin shell transform matches the closed form") {
  const double R = 1.0, w = 0.02;
  const double rho0 = 1.0 / (kFourPi / 3.0 * (std::pow(R + w / 2, 3) - std::pow(R - w / 2, 3)));
  for (double k : {0.5, 2.0, 3.1, 7.7, 12.0}) {
    const double want = oracles::shell_transform(rho0, R - w / 2, R + w / 2, k);
    CHECK(fourier_radial(shell(), k) == doctest::Approx(want).epsilon(1e-9));
    // and the thin-shell limit Q sinc(kR) within the width correction
    CHECK(std::fabs(fourier_radial(shell(), k) - std::sin(k * R) / (k * R)) < 1e-3);
  }
}

TEST_CASE("bump transform at k = 5 matches the Monte-Carlo oracle") {
  const double mc = oracles::mc_transform([&](double r) { return bump().rho(r); }, 1.0, 5.0,
                                          20'000'000, 77u);
  CHECK(std::fabs(fourier_radial(bump(), 5.0) - mc) < 1e-4);
}

TEST_CASE("transform is bounded by Q and even in k") {
  for (double k : {0.3, 1.0, 4.0, 9.0, 15.0})
    CHECK(std::fabs(fourier_radial(bump(), k)) <= bump().total_charge() + 1e-12);
}

TEST_CASE("axial marginal transform equals the radial transform") {
  for (double k : {0.7, 2.2, 6.0, 11.0})
    CHECK(std::fabs(fourier_axial_marginal(bump(), k) - fourier_radial(bump(), k)) < 1e-8);
}

TEST_CASE("marginal support and trivial cases") {
  CHECK(bump().axial_marginal(1.0) == 0.0);
  CHECK(bump().axial_marginal(-1.2) == 0.0);
  CHECK(bump().axial_marginal(0.3) == doctest::Approx(bump().axial_marginal(-0.3)));
}

TEST_CASE("wiener scan: shell fails with argmin at the first sinc zero") {
  const WienerReport rep = wiener_scan(shell(), 20.0, 600, 1e-4);
  CHECK_FALSE(rep.verdict);
  CHECK(rep.min_abs < 1e-3);
  CHECK(std::fabs(rep.argmin - kPi) < 0.01 * kPi);
}

TEST_CASE("wiener scan: the smooth bump transform has a genuine zero near k = 6.5") {
  // Oracle: bracket the sign change of the transform computed by adaptive
  // quadrature on the raw profile. This pins the scan's expected argmin.
  auto hat = [&](double k) {
    return kFourPi / k *
           oracles::integrate([&](double r) { return r * std::sin(k * r) * bump().rho(r); }, 0.0,
                              1.0, 1e-14);
  };
  double lo = 6.0, hi = 7.0;
  REQUIRE(hat(lo) > 0.0);
  REQUIRE(hat(hi) < 0.0);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (hat(mid) > 0.0 ? lo : hi) = mid;
  }
  const double k_zero = 0.5 * (lo + hi);
  CHECK(k_zero == doctest::Approx(6.5).epsilon(0.02));

  const WienerReport rep = wiener_scan(bump(), 20.0, 800, 1e-4);
  CHECK_FALSE(rep.verdict);  // genuine zero inside the window
  CHECK(rep.min_abs < 1e-9);
  CHECK(rep.argmin == doctest::Approx(k_zero).epsilon(1e-3));
}

TEST_CASE("wiener scan passes below the first zero") {
  const WienerReport rep = wiener_scan(bump(), 5.0, 400, 1e-4);
  CHECK(rep.verdict);
  CHECK(rep.min_abs > 1e-2);
}

TEST_CASE("zero density fails the scan") {
  const ChargeDensity z = charge_catalog("zero");
  const WienerReport rep = wiener_scan(z, 20.0, 100, 0.0);
  CHECK(rep.min_abs == 0.0);
  CHECK_FALSE(rep.verdict);
}

TEST_CASE("scan refinement: doubling samples does not raise the minimum") {
  const WienerReport a = wiener_scan(shell(), 20.0, 300, 1e-4);
  const WienerReport b = wiener_scan(shell(), 20.0, 600, 1e-4);
  CHECK(b.min_abs <= a.min_abs + 1e-9);
}

TEST_CASE("report serializes to json") {
  const WienerReport rep = wiener_scan(bump(), 5.0, 100, 1e-4);
  const std::string j = rep.to_json();
  CHECK(j.find("\"verdict\":\"pass\"") != std::string::npos);
  CHECK(j.find("\"k_max\":5") != std::string::npos);
}

TEST_CASE("scan validates inputs") {
  CHECK_THROWS_AS(wiener_scan(bump(), -1.0, 100, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(wiener_scan(bump(), 10.0, 1, 1e-4), std::invalid_argument);
}

}  // TEST_SUITE

#include "wavetrap/charge_density.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wavetrap {

namespace {

// Values plus 4th-order central-difference slopes, for tables whose integrand
// derivative is awkward in closed form.
CubicTable table_with_fd_slopes(double a, double b, int n, const std::function<double(double)>& f) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(a + i * h);
  std::vector<double> s(static_cast<std::size_t>(n));
  auto at = [&](int i) {
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    return v[static_cast<std::size_t>(i)];
  };
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3) {
      s[static_cast<std::size_t>(i)] = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
    } else if (i == 0) {
      s[0] = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
    } else if (i == n - 1) {
      s[static_cast<std::size_t>(i)] = (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
    } else {
      s[static_cast<std::size_t>(i)] = (at(i + 1) - at(i - 1)) / (2 * h);
    }
  }
  return CubicTable(a, b, std::move(v), std::move(s));
}

}  // namespace

ChargeDensity::ChargeDensity(ChargeProfile profile, QuadOrders orders, int table_n,
                             bool enforce_smooth_edge)
    : profile_(std::move(profile)), orders_(orders), radius_(profile_.support) {
  if (radius_ <= 0.0) throw std::invalid_argument("ChargeDensity: support radius must be positive");
  if (table_n < 64) table_n = 64;
  if (enforce_smooth_edge && std::fabs(profile_.f(radius_)) > 1e-12)
    throw std::invalid_argument("ChargeDensity: profile does not vanish at the support edge");
  if (!profile_.d2f) {
    auto df = profile_.df;
    const double eps = 1e-6 * radius_;
    profile_.d2f = [df, eps](double r) { return (df(r + eps) - df(r - eps)) / (2 * eps); };
  }
  small_ = 1e-7 * radius_;

  const double R = radius_;
  const std::vector<double>& brk = profile_.breakpoints;
  auto f = profile_.f;
  auto df = profile_.df;
  J1_ = CubicTable::accumulate(0.0, R, table_n, [&](double s) { return s * f(s); }, brk);
  J1d_ = CubicTable::sample(0.0, R, table_n, [&](double s) { return s * f(s); },
                            [&](double s) { return f(s) + s * df(s); });
  J2_ = CubicTable::accumulate(0.0, R, table_n, [&](double s) { return s * s * f(s); }, brk);
  charge_ = kFourPi * J2_.back();
  CubicTable L2 =
      CubicTable::accumulate(0.0, R, table_n, [&](double s) { return s * s * f(s) * f(s); }, brk);
  l2_sq_ = kFourPi * L2.back();

  // Autocorrelation C(d) and its derivative, by the spherical-mean collapse of
  // the convolution; s-panels split at s = d where the |s-d| branch kinks.
  auto j1_of = [&](double s) { return s < R ? J1_.eval(s) : J1_.back(); };
  auto corr_pair = [&](double d) -> std::pair<double, double> {
    if (d <= 0.0) return {l2_sq_, 0.0};
    if (d >= 2.0 * R) return {0.0, 0.0};
    auto val_integrand = [&](double s) {
      return s * f(s) * (j1_of(s + d) - j1_of(std::fabs(s - d)));
    };
    auto der_integrand = [&](double s) {
      const double sg = (d > s) ? 1.0 : (d < s ? -1.0 : 0.0);
      return s * f(s) * (j1c(s + d) - sg * j1c(std::fabs(s - d)));
    };
    // pin panels at s = d (the |s-d| kink) and at profile discontinuities,
    // shifted copies included since they kink the J1 factors
    std::vector<double> edges{d};
    for (double c : brk) {
      edges.push_back(c);
      edges.push_back(std::fabs(c - d));
      edges.push_back(c + d);
      edges.push_back(d - c);
    }
    const double v = gauss_composite_split(val_integrand, 0.0, R, 28, 12, edges);
    const double w = gauss_composite_split(der_integrand, 0.0, R, 28, 12, edges);
    return {2.0 * kPi / d * v, -2.0 * kPi / (d * d) * v + 2.0 * kPi / d * w};
  };
  {
    const int n = table_n;
    std::vector<double> cv(static_cast<std::size_t>(n)), cs(static_cast<std::size_t>(n));
    const double h = 2.0 * R / (n - 1);
    cv[0] = l2_sq_;
    cs[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      auto [v, w] = corr_pair(i * h);
      cv[static_cast<std::size_t>(i)] = v;
      cs[static_cast<std::size_t>(i)] = w;
    }
    C_ = CubicTable(0.0, 2.0 * R, std::move(cv), std::move(cs));
  }
  P1_ = CubicTable::accumulate(0.0, 2.0 * R, table_n, [&](double u) { return u * C_.eval(u); });
  P2_ = CubicTable::accumulate(0.0, 2.0 * R, table_n,
                               [&](double u) { return u * u * C_.eval(u); });
  C1_ = CubicTable::sample(0.0, 2.0 * R, table_n, [&](double u) { return u * C_.eval(u); },
                           [&](double u) { return C_.eval(u) + u * C_.deriv(u); });
  self_energy_ = -P1_.back();

  // lambda(r) = (r/3) int_0^R s^2 rho'(s) K_a(s, r) ds, split at s = r.
  auto lam = [&](double r) {
    if (r <= 0.0 || r >= 2.0 * R) return 0.0;
    auto integrand = [&](double s) { return s * s * profile_.df(s) * sphere_mean_da(s, r); };
    const double split = std::min(r, R);
    double v = gauss_composite(integrand, 0.0, split, 16, 12);
    if (split < R) v += gauss_composite(integrand, split, R, 16, 12);
    return r / 3.0 * v;
  };
  lambda_ = table_with_fd_slopes(0.0, 2.0 * R, table_n, lam);
}

Vec3 ChargeDensity::grad_rho3(const Vec3& x) const {
  const double r = norm(x);
  if (r >= radius_) return {};
  if (r < small_) {
    // smooth radial profile has zero gradient at the origin
    return {};
  }
  return (drho(r) / r) * x;
}

double ChargeDensity::coulomb(double r) const {
  if (r >= radius_) return charge_ == 0.0 ? 0.0 : -charge_ / (kFourPi * r);
  if (r < small_) return -J1_.back();
  return -J2_.eval(r) / r - (J1_.back() - J1_.eval(r));
}

double ChargeDensity::coulomb_grad(double r) const {
  if (r < small_) return 0.0;
  if (r >= radius_) return charge_ / (kFourPi * r * r);
  return J2_.eval(r) / (r * r);
}

double ChargeDensity::coulomb_grad2(double r) const {
  if (r < small_) return rho(0.0) / 3.0;
  return rho(r) - 2.0 * coulomb_grad(r) / r;
}

double ChargeDensity::sphere_mean(double a, double r) const {
  const double R = radius_;
  if (std::fabs(a - r) >= R) return 0.0;
  if (a < small_ || r < small_) return kFourPi * rho(std::max(a, r));
  const double hi = std::min(a + r, R);
  return 2.0 * kPi / (a * r) * (J1_.eval(hi) - J1_.eval(std::fabs(a - r)));
}

double ChargeDensity::sphere_mean_da(double a, double r) const {
  const double R = radius_;
  if (std::fabs(a - r) >= R) return 0.0;
  if (r < small_) r = small_;
  if (a < 1e-4 * R) {
    const double d = 1e-4 * R;
    return sphere_mean_da(d, r) * (a / d);  // K_a is odd in a near 0
  }
  const double D = (std::min(a + r, R) < R ? J1_.eval(a + r) : J1_.back()) -
                   J1_.eval(std::min(std::fabs(a - r), R));
  const double sg = (a > r) ? 1.0 : (a < r ? -1.0 : 0.0);
  const double Da = j1c(a + r) - sg * j1c(std::fabs(a - r));
  return 2.0 * kPi / (a * r) * (Da - D / a);
}

double ChargeDensity::sphere_mean_daa(double a, double r) const {
  const double R = radius_;
  if (std::fabs(a - r) >= R) return 0.0;
  if (r < small_) r = small_;
  if (a < 1e-4 * R) {
    // even part: K_aa(0,r) from the series of J1(r+a)-J1(r-a)
    return kFourPi / (3.0 * r) * (2.0 * profile_.df(r < R ? r : R) +
                                  r * (*profile_.d2f)(r < R ? r : R)) * (r < R ? 1.0 : 0.0);
  }
  const double D = (std::min(a + r, R) < R ? J1_.eval(a + r) : J1_.back()) -
                   J1_.eval(std::min(std::fabs(a - r), R));
  const double sg = (a > r) ? 1.0 : (a < r ? -1.0 : 0.0);
  const double Da = j1c(a + r) - sg * j1c(std::fabs(a - r));
  const double Daa = dj1c(a + r) - dj1c(std::fabs(a - r));
  return 2.0 * kPi / (a * r) * (2.0 * D / (a * a) - 2.0 * Da / a + Daa);
}

ChargeDensity::KernelPair ChargeDensity::sphere_mean_pair(double a, double r) const {
  KernelPair out;
  const double R = radius_;
  if (std::fabs(a - r) >= R) return out;
  if (a < 1e-4 * R || r < small_) {
    out.k = sphere_mean(a, r);
    out.ka = sphere_mean_da(a, r);
    return out;
  }
  const double hi = std::min(a + r, R);
  const double am = std::fabs(a - r);
  const double D = J1_.eval(hi) - J1_.eval(am);
  const double sg = (a > r) ? 1.0 : (a < r ? -1.0 : 0.0);
  const double Da = j1c(a + r) - sg * j1c(am);
  const double pref = 2.0 * kPi / (a * r);
  out.k = pref * D;
  out.ka = pref * (Da - D / a);
  return out;
}

double ChargeDensity::pair_kernel(double a, double r) const {
  const double R2 = 2.0 * radius_;
  if (std::fabs(a - r) >= R2) return 0.0;
  if (a < small_ || r < small_) return kFourPi * autocorrelation(std::max(a, r));
  const double hi = std::min(a + r, R2);
  return 2.0 * kPi / (a * r) * (P1_.eval(hi) - P1_.eval(std::fabs(a - r)));
}

double ChargeDensity::pair_kernel_da(double a, double r) const {
  const double R2 = 2.0 * radius_;
  if (std::fabs(a - r) >= R2) return 0.0;
  if (r < small_) r = small_;
  if (a < 1e-4 * radius_) {
    const double d = 1e-4 * radius_;
    return pair_kernel_da(d, r) * (a / d);
  }
  const double hi = std::min(a + r, R2);
  const double D = P1_.eval(hi) - P1_.eval(std::min(std::fabs(a - r), R2));
  const double sg = (a > r) ? 1.0 : (a < r ? -1.0 : 0.0);
  const double Da = c1c(a + r) - sg * c1c(std::fabs(a - r));
  return 2.0 * kPi / (a * r) * (Da - D / a);
}

Vec3 ChargeDensity::pair_force(const Vec3& c, double r) const {
  const double a = norm(c);
  if (a < 1e-14 * radius_) return {};
  return (pair_kernel_da(a, r) / a) * c;
}

double ChargeDensity::two_center_energy(double a) const {
  const double R2 = 2.0 * radius_;
  if (charge_ == 0.0 && l2_sq_ == 0.0) return 0.0;
  if (a >= R2) return -P2_.back() / a;
  if (a < small_) return self_energy_;
  return -P2_.eval(a) / a - (P1_.back() - P1_.eval(a));
}

double ChargeDensity::two_center_force(double a) const {
  if (a < small_) return 0.0;
  if (a >= 2.0 * radius_) return P2_.back() / (a * a);
  return P2_.eval(a) / (a * a);
}

double ChargeDensity::autocorrelation(double d) const {
  if (d >= 2.0 * radius_) return 0.0;
  if (d <= 0.0) return l2_sq_;
  return C_.eval(d);
}

double ChargeDensity::memory_kernel(double r) const {
  if (r <= 0.0 || r >= 2.0 * radius_) return 0.0;
  return lambda_.eval(r);
}

double ChargeDensity::axial_marginal(double s) const {
  const double u = std::fabs(s);
  if (u >= radius_) return 0.0;
  return 2.0 * kPi * (J1_.back() - J1_.eval(u));
}

double ChargeDensity::axial_marginal_d(double s) const {
  if (std::fabs(s) >= radius_) return 0.0;
  const double sg = s >= 0.0 ? 1.0 : -1.0;
  return -2.0 * kPi * sg * j1c(std::fabs(s));
}

ChargeDensity make_charge_density(std::function<double(double)> profile,
                                  std::function<double(double)> gradient_profile,
                                  double support_radius, QuadOrders orders) {
  ChargeProfile p;
  p.f = std::move(profile);
  p.df = std::move(gradient_profile);
  p.support = support_radius;
  return ChargeDensity(std::move(p), orders);
}

ChargeDensity charge_catalog(const std::string& key, const std::map<std::string, double>& params,
                             QuadOrders orders) {
  auto get = [&](const std::string& k, double fallback) {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  };
  const double R = get("radius", 1.0);
  const double Q = get("charge", 1.0);
  if (R <= 0.0) throw std::invalid_argument("charge_catalog: radius must be positive");

  ChargeProfile p;
  p.support = R;
  p.name = key;
  p.params = params;
  p.params["radius"] = R;

  if (key == "bump") {
    p.params["charge"] = Q;
    const double raw = adaptive_simpson(
        [R](double r) {
          const double u = r / R;
          return u < 1.0 ? r * r * std::exp(-1.0 / (1.0 - u * u)) : 0.0;
        },
        0.0, R, 1e-14);
    const double A = Q / (kFourPi * raw);
    p.f = [A, R](double r) {
      const double u = r / R;
      return u < 1.0 ? A * std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    };
    p.df = [A, R](double r) {
      const double u = r / R;
      if (u >= 1.0) return 0.0;
      const double g = 1.0 - u * u;
      return -A * std::exp(-1.0 / g) * (2.0 * u / (g * g)) / R;
    };
    p.d2f = [A, R](double r) {
      const double u = r / R;
      if (u >= 1.0) return 0.0;
      const double g = 1.0 - u * u;
      const double e = std::exp(-1.0 / g);
      const double w = -2.0 * u / (g * g);
      const double dw = -2.0 / (g * g) - 8.0 * u * u / (g * g * g);
      return A * e * (w * w + dw) / (R * R);
    };
    return ChargeDensity(std::move(p), orders);
  }
  if (key == "uniform_ball") {
    p.params["charge"] = Q;
    p.smooth_edge = false;
    p.breakpoints = {R};
    const double rho0 = 3.0 * Q / (kFourPi * R * R * R);
    p.f = [rho0, R](double r) { return r < R ? rho0 : 0.0; };
    p.df = [](double) { return 0.0; };
    p.d2f = [](double) { return 0.0; };
    return ChargeDensity(std::move(p), orders, 2048, false);
  }
  if (key == "shell") {
    const double w = get("width", 0.02 * R);
    if (w <= 0.0 || w >= 2.0 * R) throw std::invalid_argument("charge_catalog: bad shell width");
    p.params["charge"] = Q;
    p.params["width"] = w;
    p.smooth_edge = false;
    const double r0 = R - 0.5 * w, r1 = R + 0.5 * w;
    const double vol = kFourPi / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
    const double rho0 = Q / vol;
    p.support = r1;
    p.params["radius"] = R;  // nominal shell radius; support edge is R + w/2
    p.breakpoints = {r0, r1};
    p.f = [rho0, r0, r1](double r) { return (r >= r0 && r < r1) ? rho0 : 0.0; };
    p.df = [](double) { return 0.0; };
    p.d2f = [](double) { return 0.0; };
    return ChargeDensity(std::move(p), orders, 4096, false);
  }
  if (key == "zero") {
    p.f = [](double) { return 0.0; };
    p.df = [](double) { return 0.0; };
    p.d2f = [](double) { return 0.0; };
    return ChargeDensity(std::move(p), orders);
  }
  throw std::invalid_argument("charge_catalog: unknown density '" + key + "'");
}

StationaryState stationary_state(const ChargeDensity& rho, const Vec3& center) {
  StationaryState s;
  s.center = center;
  // capture a copy so the state outlives the density it was built from
  s.coulomb_field = [rho, center](const Vec3& x) { return rho.coulomb(norm(x - center)); };
  return s;
}

}  // namespace wavetrap

#include "wavetrap/initial_field.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace wavetrap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// normalized C^inf bump window: B(0) = 1, B(u) = 0 for |u| >= 1
double bump_win(double u) {
  const double u2 = u * u;
  return u2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u2)) : 0.0;
}
double bump_win_d(double u) {
  const double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  const double g = 1.0 - u2;
  return -bump_win(u) * 2.0 * u / (g * g);
}
double bump_win_d2(double u) {
  const double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  const double g = 1.0 - u2;
  const double w = -2.0 * u / (g * g);
  const double dw = -2.0 / (g * g) - 8.0 * u2 / (g * g * g);
  return bump_win(u) * (w * w + dw);
}

// C^inf step: 0 for x <= 0, 1 for x >= 1
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double fa = std::exp(-1.0 / x);
  const double fb = std::exp(-1.0 / (1.0 - x));
  return fa / (fa + fb);
}
double smooth_step_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double e = 1e-6;
  return (smooth_step(x + e) - smooth_step(x - e)) / (2.0 * e);
}

struct ProfileFns {
  std::function<double(double)> u0, du0, d2u0;
};

// wrap radial profiles into the full 3D callables around `center`
void attach_callables(FieldInitialData& d) {
  auto pulses = std::make_shared<std::vector<RadialPulse>>(d.pulses);
  d.phi0 = [pulses](const Vec3& x) {
    double s = 0.0;
    for (const auto& p : *pulses) s += p.u0(norm(x - p.center));
    return s;
  };
  d.pi0 = [pulses](const Vec3& x) {
    double s = 0.0;
    for (const auto& p : *pulses) s += p.v0(norm(x - p.center));
    return s;
  };
  d.grad_phi0 = [pulses](const Vec3& x) {
    Vec3 g{};
    for (const auto& p : *pulses) {
      const Vec3 u = x - p.center;
      const double r = norm(u);
      if (r > 1e-12) g += (p.du0(r) / r) * u;
    }
    return g;
  };
  d.grad_pi0 = [pulses](const Vec3& x) {
    Vec3 g{};
    for (const auto& p : *pulses) {
      const Vec3 u = x - p.center;
      const double r = norm(u);
      if (r > 1e-12) g += (p.dv0(r) / r) * u;
    }
    return g;
  };
  d.hess_phi0 = [pulses](const Vec3& x) {
    Mat3 H{};
    for (const auto& p : *pulses) {
      const Vec3 u = x - p.center;
      const double r = norm(u);
      if (r < 1e-10) {
        const double c = p.d2u0(1e-10);
        H(0, 0) += c; H(1, 1) += c; H(2, 2) += c;
        continue;
      }
      const double d2 = p.d2u0(r), d1 = p.du0(r) / r;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double rij = u[i] * u[j] / (r * r);
          H(i, j) += d2 * rij + d1 * ((i == j ? 1.0 : 0.0) - rij);
        }
    }
    return H;
  };
}

RadialPulse matched_pulse(const ChargeDensity& rho, const Vec3& center, double sign) {
  RadialPulse p;
  p.center = center;
  p.support = kInf;
  p.u0 = [rho, sign](double r) { return sign * rho.coulomb(r); };
  p.du0 = [rho, sign](double r) { return sign * rho.coulomb_grad(r); };
  p.d2u0 = [rho, sign](double r) { return sign * rho.coulomb_grad2(r); };
  p.v0 = [](double) { return 0.0; };
  p.dv0 = [](double) { return 0.0; };
  p.iv = [](double) { return 0.0; };
  p.iv_total = 0.0;
  return p;
}

}  // namespace

KirchhoffSample kirchhoff_field(const FieldInitialData& d, const Vec3& x, double t,
                                int nmu, int nphi) {
  if (t <= 0.0) throw std::invalid_argument("kirchhoff_field: requires t > 0");
  KirchhoffSample out;
  if (d.is_zero()) return out;
  const SphereRule sphere(nmu, nphi);
  double m_pi0 = 0.0, m_phi0 = 0.0, m_gphi_z = 0.0, m_gpi_z = 0.0, m_hess_zz = 0.0;
  Vec3 m_gphi{}, m_gpi{}, m_hess_z{};
  for (const auto& node : sphere.nodes) {
    const Vec3 y = x + t * node.dir;
    const double w = node.w;
    m_pi0 += w * d.pi0(y);
    m_phi0 += w * d.phi0(y);
    const Vec3 gphi = d.grad_phi0(y);
    const Vec3 gpi = d.grad_pi0(y);
    const Mat3 H = d.hess_phi0(y);
    const Vec3 Hz = H.apply(node.dir);
    m_gphi_z += w * dot(gphi, node.dir);
    m_gpi_z += w * dot(gpi, node.dir);
    m_hess_zz += w * dot(Hz, node.dir);
    m_gphi += w * gphi;
    m_gpi += w * gpi;
    m_hess_z += w * Hz;
  }
  const double inv = 1.0 / kFourPi;
  out.phi = inv * (t * m_pi0 + m_phi0 + t * m_gphi_z);
  out.pi = inv * (m_pi0 + t * m_gpi_z + 2.0 * m_gphi_z + t * m_hess_zz);
  out.grad_phi = inv * (t * m_gpi + m_gphi + t * m_hess_z);
  return out;
}

KirchhoffSample kirchhoffsample_radial(const RadialPulse& p, double r, double t, Vec3 rhat) {
  // d'Alembert on w = r*u with odd extension; exact for radial data
  KirchhoffSample out;
  const double sp = p.support;
  if (std::isfinite(sp) && std::fabs(r - t) >= sp) return out;  // strong Huygens

  auto u0at = [&](double s) { return p.u0(std::fabs(s)); };
  auto du0at = [&](double s) { return p.du0(std::fabs(s)); };
  auto v0at = [&](double s) { return p.v0(std::fabs(s)); };

  if (r < 1e-7 * (1.0 + t)) {
    out.phi = u0at(t) + t * du0at(t) + t * v0at(t);
    out.pi = 2.0 * du0at(t) + t * p.d2u0(t) + v0at(t) + t * p.dv0(t);
    out.grad_phi = Vec3{};
    return out;
  }
  const double sm = r - t, sq = r + t;
  const double am = std::fabs(sm);
  const double w0p = sq * u0at(sq), w0m = sm * u0at(am);
  const double ivp = p.iv(sq), ivm = p.iv(am);
  out.phi = (w0p + w0m + ivp - ivm) / (2.0 * r);
  const double w0dp = u0at(sq) + sq * du0at(sq);
  const double w0dm = u0at(am) + am * du0at(am);
  const double w1p = sq * v0at(sq), w1m = sm * v0at(am);
  out.pi = (w0dp - w0dm + w1p + w1m) / (2.0 * r);
  const double dNdr = w0dp + w0dm + w1p - w1m;
  const double dudr = (dNdr - 2.0 * out.phi) / (2.0 * r);
  out.grad_phi = dudr * rhat;
  return out;
}

KirchhoffSample kirchhoff_field_exact(const FieldInitialData& d, const Vec3& x, double t) {
  KirchhoffSample out;
  if (t < 0.0) throw std::invalid_argument("kirchhoff_field_exact: requires t >= 0");
  for (const auto& p : d.pulses) {
    const Vec3 u = x - p.center;
    const double r = norm(u);
    const Vec3 rhat = r > 1e-14 ? u / r : Vec3{};
    const KirchhoffSample s = kirchhoffsample_radial(p, r, t, rhat);
    out.phi += s.phi;
    out.pi += s.pi;
    out.grad_phi += s.grad_phi;
  }
  if (d.pulses.empty() && d.phi0) {
    // data given only through callables: fall back to spherical means
    if (t > 0.0) return kirchhoff_field(d, x, t);
    out.phi = d.phi0(x);
    out.pi = d.pi0(x);
    out.grad_phi = d.grad_phi0(x);
  }
  return out;
}

FieldInitialData field_catalog(const std::string& key,
                               const std::map<std::string, double>& params,
                               const ChargeDensity* rho) {
  auto get = [&](const std::string& k, double fallback) {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  };
  FieldInitialData d;
  d.name = key;
  d.params = params;
  const Vec3 center{get("center1", 0.0), get("center2", 0.0), get("center3", 0.0)};
  d.plane_symmetric = center.z == 0.0;

  if (key == "zero") {
    d.decay.compact_radius = 0.0;
    return d;
  }
  if (key == "matched") {
    if (rho == nullptr) throw std::invalid_argument("field_catalog: 'matched' needs a density");
    d.pulses.push_back(matched_pulse(*rho, center, 1.0));
    d.decay.sigma = 2.0;  // Coulomb gradient tail
    attach_callables(d);
    return d;
  }
  if (key == "matched_difference") {
    if (rho == nullptr)
      throw std::invalid_argument("field_catalog: 'matched_difference' needs a density");
    const Vec3 ref{get("ref1", 0.0), get("ref2", 0.0), get("ref3", 0.0)};
    d = matched_difference_field(*rho, center, ref);
    d.name = key;
    d.params = params;
    return d;
  }
  if (key == "pulse") {
    const double a = get("radius", 1.0);
    const double pa = get("phi_amp", 0.0);
    const double va = get("pi_amp", 1.0);
    if (a <= 0.0) throw std::invalid_argument("field_catalog: pulse radius must be positive");
    RadialPulse p;
    p.center = center;
    p.support = a;
    p.u0 = [pa, a](double r) { return pa * bump_win(r / a); };
    p.du0 = [pa, a](double r) { return pa * bump_win_d(r / a) / a; };
    p.d2u0 = [pa, a](double r) { return pa * bump_win_d2(r / a) / (a * a); };
    p.v0 = [va, a](double r) { return va * bump_win(r / a); };
    p.dv0 = [va, a](double r) { return va * bump_win_d(r / a) / a; };
    auto tbl = std::make_shared<CubicTable>(CubicTable::accumulate(
        0.0, a, 1024, [va, a](double s) { return s * va * bump_win(s / a); }));
    p.iv_total = tbl->back();
    p.iv = [tbl, a](double s) {
      s = std::fabs(s);
      return s >= a ? tbl->back() : tbl->eval(s);
    };
    d.pulses.push_back(std::move(p));
    d.decay.compact_radius = norm(center) + a;
    attach_callables(d);
    return d;
  }
  if (key == "matched_plus_pulse") {
    if (rho == nullptr)
      throw std::invalid_argument("field_catalog: 'matched_plus_pulse' needs a density");
    std::map<std::string, double> pp;
    pp["center1"] = get("pulse_center1", 0.0);
    pp["center2"] = get("pulse_center2", 0.0);
    pp["center3"] = get("pulse_center3", 0.0);
    pp["radius"] = get("pulse_radius", 1.0);
    pp["phi_amp"] = get("pulse_phi_amp", 0.0);
    pp["pi_amp"] = get("pulse_pi_amp", 0.0);
    FieldInitialData pulse_part = field_catalog("pulse", pp, rho);
    d.pulses.push_back(matched_pulse(*rho, center, 1.0));
    d.pulses.push_back(pulse_part.pulses.front());
    d.decay.sigma = 2.0;
    d.plane_symmetric = center.z == 0.0 && pp["center3"] == 0.0;
    attach_callables(d);
    return d;
  }
  if (key == "plateau") {
    const double a = get("radius", 1.0);
    const double va = get("pi_amp", 1.0);
    const double edge = get("edge", 0.25 * a);
    if (a <= 0.0 || edge <= 0.0 || edge >= a)
      throw std::invalid_argument("field_catalog: bad plateau geometry");
    RadialPulse p;
    p.center = center;
    p.support = a;
    p.u0 = [](double) { return 0.0; };
    p.du0 = [](double) { return 0.0; };
    p.d2u0 = [](double) { return 0.0; };
    p.v0 = [va, a, edge](double r) { return va * smooth_step((a - r) / edge); };
    p.dv0 = [va, a, edge](double r) { return -va * smooth_step_d((a - r) / edge) / edge; };
    auto v0c = p.v0;
    auto tbl = std::make_shared<CubicTable>(CubicTable::accumulate(
        0.0, a, 1024, [v0c](double s) { return s * v0c(s); }));
    p.iv_total = tbl->back();
    p.iv = [tbl, a](double s) {
      s = std::fabs(s);
      return s >= a ? tbl->back() : tbl->eval(s);
    };
    d.pulses.push_back(std::move(p));
    d.decay.compact_radius = norm(center) + a;
    attach_callables(d);
    return d;
  }
  throw std::invalid_argument("field_catalog: unknown field '" + key + "'");
}

FieldInitialData field_from_pulses(std::vector<RadialPulse> pulses, DecayClass decay) {
  FieldInitialData d;
  d.name = "composite";
  d.pulses = std::move(pulses);
  d.decay = decay;
  d.plane_symmetric = true;
  for (const auto& p : d.pulses) d.plane_symmetric = d.plane_symmetric && p.center.z == 0.0;
  attach_callables(d);
  return d;
}

FieldInitialData matched_difference_field(const ChargeDensity& rho, const Vec3& c1, const Vec3& c0) {
  FieldInitialData d;
  d.name = "matched_difference";
  d.pulses.push_back(matched_pulse(rho, c1, 1.0));
  d.pulses.push_back(matched_pulse(rho, c0, -1.0));
  d.plane_symmetric = (c1.z == 0.0 && c0.z == 0.0);
  d.decay.sigma = 3.0;  // dipole difference of Coulomb tails
  attach_callables(d);
  return d;
}

}  // namespace wavetrap

#include "wavetrap/retarded_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavetrap/quadrature.hpp"

namespace wavetrap {

namespace {


}  // namespace

LwSample RetardedField::lw_field(const Vec3& x, double t) const {
  LwSample out;
  if (t <= 0.0) return out;
  const double tend = view_->end_time();
  if (t > tend + 1e-9 * (1.0 + tend))
    throw std::out_of_range("lw_field: t beyond the recorded history");
  if (rho_->is_zero()) return out;

  const double B = source_bound();
  const double ax = norm(x);
  const double tau_lo = std::max(0.0, t - (ax + B));
  const double tau_hi = t - std::max(0.0, ax - B);

  double acc_phi = 0.0, acc_pi = 0.0;
  Vec3 acc_grad{};
  knot_aligned_panels(view_->step(), tau_lo, std::min(tau_hi, t), order_, [&](double tau, double w) {
    const Kin k = view_->state(tau);
    const Vec3 d = x - k.q;
    const double a = norm(d);
    const double r = t - tau;
    const ChargeDensity::KernelPair kp = rho_->sphere_mean_pair(a, r);
    const Vec3 nhat = a > 1e-14 ? d / a : Vec3{};
    acc_phi += w * r * kp.k;
    acc_grad += (w * r * kp.ka) * nhat;
    acc_pi += w * r * kp.ka * dot(nhat, k.v);
  });

  // switch-on boundary: the retarded sphere r = t sweeping the initial source
  const double Kb = rho_->sphere_mean(norm(x - view_->position(0.0)), t);

  const double inv = 1.0 / kFourPi;
  out.phi = -inv * acc_phi;
  out.grad_phi = -inv * acc_grad;
  out.pi = -inv * t * Kb + inv * acc_pi;
  return out;
}

LwSample RetardedField::lw_field_quadrature(const Vec3& x, double t) const {
  LwSample out;
  if (t <= 0.0 || rho_->is_zero()) return out;
  const double B = source_bound();
  const double ax = norm(x);
  const QuadOrders& q = rho_->orders();
  const double r_lo = std::max(0.0, ax - B);
  const double r_hi = std::min(t, ax + B);

  // polar axis toward the origin bounds the support cap
  Vec3 e = ax > 1e-12 ? (-1.0 / ax) * x : Vec3{0, 0, 1};
  Vec3 e1 = std::fabs(e.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  e1 = e1 - dot(e1, e) * e;
  e1 = e1 / norm(e1);
  const Vec3 e2{e.y * e1.z - e.z * e1.y, e.z * e1.x - e.x * e1.z, e.x * e1.y - e.y * e1.x};

  const GaussRule& gmu = gauss_rule(q.ball_mu);
  const double dphi = 2.0 * kPi / q.ball_phi;

  auto sphere_part = [&](double r, auto&& fn) {
    double mu_min = -1.0;
    if (ax > 1e-12) mu_min = std::clamp((ax * ax + r * r - B * B) / (2.0 * r * ax), -1.0, 1.0);
    const double half = 0.5 * (1.0 - mu_min);
    if (half <= 0.0) return;
    for (std::size_t im = 0; im < gmu.x.size(); ++im) {
      const double mu = mu_min + half * (gmu.x[im] + 1.0);
      const double wmu = half * gmu.w[im];
      const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int ip = 0; ip < q.ball_phi; ++ip) {
        const double ph = dphi * ip;
        const Vec3 n = mu * e + s * (std::cos(ph) * e1 + std::sin(ph) * e2);
        fn(n, wmu * dphi);
      }
    }
  };

  double acc_phi = 0.0, acc_pi = 0.0;
  Vec3 acc_grad{};
  knot_aligned_panels(view_->step(), t - r_hi, t - r_lo, 4, [&](double tau, double w) {
    const double r = t - tau;
    const Kin k = view_->state(tau);
    sphere_part(r, [&](const Vec3& n, double wn) {
      const Vec3 z = x + r * n - k.q;
      const double rho_v = rho_->rho3(z);
      if (rho_v == 0.0 && dot(z, z) >= rho_->support_radius() * rho_->support_radius()) {
        // gradient vanishes there too
        return;
      }
      const Vec3 gr = rho_->grad_rho3(z);
      acc_phi += w * wn * r * rho_v;
      acc_grad += (w * wn * r) * gr;
      acc_pi += w * wn * r * dot(gr, k.v);
    });
  });

  double bdry = 0.0;
  if (t >= r_lo && t <= ax + B) {
    const Vec3 q0 = view_->position(0.0);
    sphere_part(t, [&](const Vec3& n, double wn) { bdry += wn * rho_->rho3(x + t * n - q0); });
  }

  const double inv = 1.0 / kFourPi;
  out.phi = -inv * acc_phi;
  out.grad_phi = -inv * acc_grad;
  out.pi = -inv * t * bdry + inv * acc_pi;
  return out;
}

FieldSample field_eval(const ChargeDensity& rho, const HistoryView& view,
                       const FieldInitialData& data, const Vec3& x, double t, int panel_order) {
  FieldSample s;
  const RetardedField rf(rho, view, panel_order);
  const LwSample lw = rf.lw_field(x, t);
  s.phi_r = lw.phi;
  s.pi_r = lw.pi;
  s.grad_phi_r = lw.grad_phi;
  const KirchhoffSample k = kirchhoff_field_exact(data, x, t);
  s.phi_k = k.phi;
  s.pi_k = k.pi;
  s.grad_phi_k = k.grad_phi;
  s.phi = s.phi_r + s.phi_k;
  s.pi = s.pi_r + s.pi_k;
  s.grad_phi = s.grad_phi_r + s.grad_phi_k;
  return s;
}

double theta_threshold(double speed_bound, double eps) {
  if (speed_bound < 1.0) return 0.0;
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("theta_threshold: eps must be in (0,1)");
  const double root = std::sqrt(1.0 - 1.0 / (speed_bound * speed_bound));
  if (!(eps < 1.0 - root))
    throw std::invalid_argument("theta_threshold: eps too large for this speed bound");
  return eps + root;
}

namespace {

void check_cover(const HistoryView& view, double t, double B, const char* who) {
  const double tend = view.end_time();
  if (t - B < -1e-9 || t + B > tend + 1e-9 * (1.0 + tend))
    throw std::out_of_range(std::string(who) + ": history does not cover the sliced retarded window");
}

}  // namespace

double farfield_amplitude(const ChargeDensity& rho, const HistoryView& view, const Vec3& omega,
                          double t, FarfieldRoute route, int panel_order) {
  const double B = view.radius_bound() + rho.support_radius();
  check_cover(view, t, B, "farfield_amplitude");
  if (rho.is_zero()) return 0.0;

  if (route == FarfieldRoute::General3D) {
    const QuadOrders& q = rho.orders();
    const BallRule ball({}, B, q.ball_r, q.ball_mu, q.ball_phi);
    double acc = 0.0;
    for (const auto& node : ball.nodes) {
      const double tau = t + dot(omega, node.x);
      const Kin k = view.state(tau);
      acc += node.w * dot(rho.grad_rho3(node.x - k.q), k.v);
    }
    return acc / kFourPi;
  }
  double acc = 0.0;
  knot_aligned_panels(view.step(), t - B, t + B, panel_order, [&](double tau, double w) {
    const Kin k = view.state(tau);
    const double zeta = (tau - t) - dot(omega, k.q);
    acc += w * rho.axial_marginal_d(zeta) * dot(omega, k.v);
  });
  return acc / kFourPi;
}

double farfield_amplitude_cone(const ChargeDensity& rho, const HistoryView& view,
                               const Vec3& omega, double t, FarfieldRoute route, double eps,
                               double* denom_min, int panel_order) {
  const double theta = theta_threshold(view.speed_bound(), eps);
  if (std::fabs(omega.z) < theta)
    throw std::invalid_argument("farfield_amplitude_cone: direction outside the admissible cone");
  const double B = view.radius_bound() + rho.support_radius();
  check_cover(view, t, B, "farfield_amplitude_cone");
  double dmin = 2.0;
  double result = 0.0;
  if (rho.is_zero()) {
    if (denom_min) *denom_min = dmin;
    return 0.0;
  }

  if (route == FarfieldRoute::General3D) {
    const QuadOrders& q = rho.orders();
    const BallRule ball({}, B, q.ball_r, q.ball_mu, q.ball_phi);
    double acc = 0.0;
    for (const auto& node : ball.nodes) {
      const double tau = t + dot(omega, node.x);
      const Kin k = view.state(tau);
      const double denom = 1.0 - dot(omega, k.v);
      dmin = std::min(dmin, denom);
      acc += node.w * rho.rho3(node.x - k.q) * dot(omega, k.a) / (denom * denom);
    }
    result = -acc / kFourPi;
  } else {
    double acc = 0.0;
    knot_aligned_panels(view.step(), t - B, t + B, panel_order, [&](double tau, double w) {
      const Kin k = view.state(tau);
      const double zeta = (tau - t) - dot(omega, k.q);
      const double denom = 1.0 - dot(omega, k.v);
      dmin = std::min(dmin, denom);
      acc += w * rho.axial_marginal(zeta) * dot(omega, k.a) / (denom * denom);
    });
    result = -acc / kFourPi;
  }
  if (denom_min) *denom_min = dmin;
  return result;
}

}  // namespace wavetrap

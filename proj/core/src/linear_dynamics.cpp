#include "wavetrap/linear_dynamics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wavetrap {

namespace {


// int_0^{min(t, 2R)} lambda(r) Q(t - r) dr through the history view
Vec3 memory_force(const ChargeDensity& rho, const HistoryView& view, double t, int order) {
  Vec3 acc{};
  const double lo = std::max(0.0, t - 2.0 * rho.support_radius());
  knot_aligned_panels(view.step(), lo, t, order, [&](double tau, double w) {
    acc += (w * rho.memory_kernel(t - tau)) * view.position(tau);
  });
  return acc;
}

Vec3 data_force(const ChargeDensity& rho, const FieldInitialData& data, double t,
                const QuadOrders& quad) {
  if (data.pulses.empty()) return {};
  const double R = rho.support_radius();
  bool all_past = true;
  for (const auto& pulse : data.pulses) {
    if (!std::isfinite(pulse.support) || t <= norm(pulse.center) + R + pulse.support) {
      all_past = false;
      break;
    }
  }
  if (all_past) return {};
  const BallRule ball({}, R, quad.ball_r, quad.ball_mu, quad.ball_phi);
  Vec3 f{};
  for (const auto& node : ball.nodes) {
    const Vec3 g = rho.grad_rho3(node.x);
    if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
    f += (node.w * kirchhoff_field_exact(data, node.x, t).phi) * g;
  }
  return f;
}

// retarded dipole amplitude of the source history and its derivatives:
// Psi_r(x,t) = xhat . Lambda(|x|,t)
struct DipoleAmplitude {
  Vec3 value{}, d_a{}, d_t{};
};

DipoleAmplitude dipole_amplitude(const ChargeDensity& rho, const HistoryView& view, double a,
                                 double t, int order) {
  DipoleAmplitude out;
  const double R = rho.support_radius();
  const double lo = std::max(0.0, t - (a + R));
  const double hi = std::min(t, t - (a - R));
  knot_aligned_panels(view.step(), lo, hi, order, [&](double tau, double w) {
    const double r = t - tau;
    const Kin k = view.state(tau);
    const double ka = rho.sphere_mean_da(a, r);
    out.value += (w * r * ka) * k.q;
    out.d_a += (w * r * rho.sphere_mean_daa(a, r)) * k.q;
    out.d_t += (w * r * ka) * k.v;
  });
  // switch-on boundary of the Leibniz derivative in t
  out.d_t += (t * rho.sphere_mean_da(a, t)) * view.position(0.0);
  const double inv = 1.0 / kFourPi;
  out.value *= inv;
  out.d_a *= inv;
  out.d_t *= inv;
  return out;
}

}  // namespace

LinearRhs linear_apply_A(const ChargeDensity& rho, double nu0_sq, const LinearStateFn& z,
                         const QuadOrders& quad) {
  LinearRhs rhs;
  rhs.dpsi = z.pi;
  auto lap = z.lap_psi;
  const Vec3 Q = z.Q;
  rhs.dpi = [rho, lap, Q](const Vec3& x) {
    return (lap ? lap(x) : 0.0) + dot(rho.grad_rho3(x), Q);
  };
  rhs.dQ = z.P;
  Vec3 coupling{};
  if (z.psi) {
    const BallRule ball({}, rho.support_radius(), quad.ball_r, quad.ball_mu, quad.ball_phi);
    for (const auto& node : ball.nodes) coupling += (node.w * z.psi(node.x)) * rho.grad_rho3(node.x);
  }
  rhs.dP = -(nu0_sq + rho.nu1_sq()) * z.Q + coupling;
  return rhs;
}

LinearRecord linear_simulate(const ChargeDensity& rho, const LinearConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const double h = cfg.step;
  if (!(h > 0.0)) throw std::invalid_argument("linear_simulate: step must be positive");
  const auto steps = static_cast<long long>(std::llround(cfg.horizon / h));
  if (steps < 1 || std::fabs(cfg.horizon - static_cast<double>(steps) * h) > 1e-9 * cfg.horizon)
    throw std::invalid_argument("linear_simulate: horizon must be a positive multiple of the step");

  FieldInitialData data = cfg.data_override ? *cfg.data_override
                                            : field_catalog(cfg.field_kind, cfg.field_params, &rho);
  LinearRecord rec{rho, cfg, std::move(data), TrajectoryHistory(h), rho.nu1_sq(), 0.0};
  const double spring = cfg.nu0_sq + rec.nu1_sq;

  Vec3 Q = cfg.Q0, P = cfg.P0;
  rec.history.append(Q, P, Vec3{});
  {
    HistoryView view(rec.history);
    const Vec3 a0 = -spring * Q + memory_force(rho, view, 0.0, cfg.panel_order) +
                    data_force(rho, rec.data, 0.0, cfg.quad);
    rec.history.set_last_accel(a0);
  }

  for (long long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * h;
    HistoryView view(rec.history);
    auto rhs = [&](double ts, const Vec3& Qs, const Vec3& Ps, Vec3& dQ, Vec3& dP) {
      if (ts > t) view.set_extension(ts, Qs, Ps);
      else view.clear_extension();
      dQ = Ps;
      dP = -spring * Qs + memory_force(rho, view, ts, cfg.panel_order) +
           data_force(rho, rec.data, ts, cfg.quad);
    };
    Vec3 k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    rhs(t, Q, P, k1q, k1p);
    rhs(t + 0.5 * h, Q + 0.5 * h * k1q, P + 0.5 * h * k1p, k2q, k2p);
    rhs(t + 0.5 * h, Q + 0.5 * h * k2q, P + 0.5 * h * k2p, k3q, k3p);
    rhs(t + h, Q + h * k3q, P + h * k3p, k4q, k4p);
    Q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    P += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    view.set_extension(t + h, Q, P);
    const Vec3 a = -spring * Q + memory_force(rho, view, t + h, cfg.panel_order) +
                   data_force(rho, rec.data, t + h, cfg.quad);
    rec.history.append(Q, P, a);
    if (!finite(Q) || !finite(P)) throw std::runtime_error("linear_simulate: nonfinite state");
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

LinearFieldSample linear_field_eval(const LinearRecord& rec, const Vec3& x, double t) {
  LinearFieldSample s;
  HistoryView view(rec.history);
  const double a = norm(x);
  const DipoleAmplitude amp =
      dipole_amplitude(rec.rho, view, std::max(a, 1e-10), t, rec.config.panel_order);
  const Vec3 xh = a > 1e-10 ? x / a : Vec3{};
  s.psi = dot(xh, amp.value);
  s.pi = dot(xh, amp.d_t);
  if (a > 1e-10)
    s.grad_psi = (amp.value - dot(xh, amp.value) * xh) / a + dot(xh, amp.d_a) * xh;
  const KirchhoffSample k = kirchhoff_field_exact(rec.data, x, t);
  s.psi += k.phi;
  s.pi += k.pi;
  s.grad_psi += k.grad_phi;
  return s;
}

LinearEnergy linear_energy(const LinearRecord& rec, double t, double r_trunc, double panel_width) {
  LinearEnergy e;
  e.radius = r_trunc;
  HistoryView view(rec.history);
  const Kin k = view.state(t);
  const double spring = rec.config.nu0_sq + rec.nu1_sq;
  e.particle = 0.5 * dot(k.v, k.v) + 0.5 * spring * dot(k.q, k.q);

  const double R = rec.rho.support_radius();
  if (!rec.data.pulses.empty())
    throw std::invalid_argument(
        "linear_energy: 1D reduction requires zero initial field data (use a grid evaluation)");

  // field energy of the pure dipole field on [0, r_trunc]
  const double a_max = std::min(r_trunc, t + R);
  double acc = 0.0;
  const int panels = std::max(4, static_cast<int>(std::ceil(a_max / panel_width)));
  const GaussRule& g = gauss_rule(6);
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = a_max * pnl / panels, hi = a_max * (pnl + 1) / panels;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double a = mid + half * g.x[i];
      const double w = half * g.w[i];
      const DipoleAmplitude amp = dipole_amplitude(rec.rho, view, a, t, rec.config.panel_order);
      acc += w * (a * a * dot(amp.d_t, amp.d_t) + 2.0 * dot(amp.value, amp.value) +
                  a * a * dot(amp.d_a, amp.d_a));
    }
  }
  e.field = 0.5 * (kFourPi / 3.0) * acc;
  e.tail_bound = (r_trunc >= t + R) ? 0.0 : -1.0;  // -1: truncation cut the light cone

  // coupling - int Psi grad rho . Q = - Q . int_0^t lambda(r) Q(t-r) dr
  Vec3 mem{};
  knot_aligned_panels(view.step(), std::max(0.0, t - 2.0 * R), t, rec.config.panel_order,
                 [&](double tau, double w) {
                   mem += (w * rec.rho.memory_kernel(t - tau)) * view.position(tau);
                 });
  e.coupling = -dot(k.q, mem);
  e.total = e.particle + e.field + e.coupling;
  return e;
}

LinearEnergy linear_energy_grid(const LinearRecord& rec, double t, double r_trunc,
                                const QuadOrders& quad) {
  LinearEnergy e;
  e.radius = r_trunc;
  HistoryView view(rec.history);
  const Kin k = view.state(t);
  const double spring = rec.config.nu0_sq + rec.nu1_sq;
  e.particle = 0.5 * dot(k.v, k.v) + 0.5 * spring * dot(k.q, k.q);

  const BallRule ball({}, r_trunc, quad.ball_r, quad.ball_mu, quad.ball_phi);
  double facc = 0.0;
  for (const auto& node : ball.nodes) {
    const LinearFieldSample s = linear_field_eval(rec, node.x, t);
    facc += node.w * (s.pi * s.pi + dot(s.grad_psi, s.grad_psi));
  }
  e.field = 0.5 * facc;

  const double R = rec.rho.support_radius();
  const BallRule src({}, R, quad.ball_r, quad.ball_mu, quad.ball_phi);
  double cacc = 0.0;
  for (const auto& node : src.nodes) {
    const Vec3 g = rec.rho.grad_rho3(node.x);
    if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
    cacc += node.w * linear_field_eval(rec, node.x, t).psi * dot(g, k.q);
  }
  e.coupling = -cacc;

  double extent = t + R;
  for (const auto& p : rec.data.pulses)
    if (std::isfinite(p.support)) extent = std::max(extent, norm(p.center) + p.support + t);
  e.tail_bound = (r_trunc >= extent && std::isfinite(extent)) ? 0.0 : -1.0;
  e.total = e.particle + e.field + e.coupling;
  return e;
}

}  // namespace wavetrap

#include "wavetrap/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wavetrap {

namespace {


}  // namespace

Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario sc{charge_catalog(cfg.rho_kind, cfg.rho_params, cfg.quad),
              potential_catalog(cfg.potential_kind, cfg.potential_params),
              FieldInitialData{}, FieldInitialData{}, std::nullopt};
  sc.potential.validate();

  std::map<std::string, double> fp = cfg.field_params;
  const bool matched_kind = cfg.field_kind == "matched" || cfg.field_kind == "matched_plus_pulse";
  if (matched_kind) {
    if (fp.find("center1") == fp.end() && fp.find("center2") == fp.end() &&
        fp.find("center3") == fp.end()) {
      fp["center1"] = cfg.q0.x;
      fp["center2"] = cfg.q0.y;
      fp["center3"] = cfg.q0.z;
    }
    sc.field = field_catalog(cfg.field_kind, fp, &sc.rho);
    sc.ref_center = sc.field.pulses.front().center;
    // data relative to the static reference: everything but the Coulomb part
    if (sc.field.pulses.size() > 1)
      sc.deviation_field = field_from_pulses(
          {sc.field.pulses.begin() + 1, sc.field.pulses.end()}, sc.field.decay);
  } else {
    sc.field = field_catalog(cfg.field_kind, fp, &sc.rho);
    sc.deviation_field = sc.field;
  }

  if (cfg.plane_mode) {
    if (std::fabs(cfg.q0.z) > 0.0 || std::fabs(cfg.p0.z) > 0.0)
      throw std::invalid_argument(
          "scenario: plane mode requires init.q3 = 0 and init.p3 = 0 (planar-motion constraint)");
    if (!sc.field.plane_symmetric)
      throw std::invalid_argument("scenario: plane mode requires fields even in x3");
  }
  return sc;
}

SelfForce::SelfForce(const Scenario& sc, const HistoryView& view, int panel_order,
                     const QuadOrders& quad)
    : sc_(&sc), view_(&view), order_(panel_order), quad_(quad) {}

ForceParts SelfForce::eval(const Vec3& q, double t, const ConfiningPotential& V) const {
  ForceParts parts;
  parts.potential = -V.gradient(q);
  const ChargeDensity& rho = sc_->rho;
  if (rho.is_zero()) return parts;
  const double R = rho.support_radius();

  const bool has_ref = sc_->ref_center.has_value();
  const Vec3 ref = has_ref ? *sc_->ref_center : Vec3{};

  // retarded memory integral over the collapsed pair kernel
  double cmax = norm(q) + view_->radius_bound();
  if (has_ref) cmax = std::max(cmax, norm(q - ref));
  const double r_cut = cmax + 2.0 * R;
  Vec3 acc{};
  knot_aligned_panels(view_->step(), std::max(0.0, t - r_cut), t, order_, [&](double tau, double w) {
    const double r = t - tau;
    acc += w * r * rho.pair_force(q - view_->position(tau), r);
    if (has_ref) acc -= w * r * rho.pair_force(q - ref, r);
  });
  parts.self = acc / kFourPi;
  if (has_ref) {
    const Vec3 c = q - ref;
    const double a = norm(c);
    if (a > 1e-14) parts.self -= (rho.two_center_force(a) / a) * c;
  }

  // free data part: ball quadrature against grad rho, skipped once every
  // compact pulse has swept past the support ball
  const FieldInitialData& data = sc_->deviation_field;
  if (!data.pulses.empty()) {
    bool all_past = true;
    for (const auto& pulse : data.pulses) {
      if (!std::isfinite(pulse.support)) {
        all_past = false;
        break;
      }
      const double d = norm(q - pulse.center);
      if (t <= d + R + pulse.support + view_->step()) {
        all_past = false;
        break;
      }
    }
    if (!all_past) {
      const BallRule ball(q, R, quad_.ball_r, quad_.ball_mu, quad_.ball_phi);
      Vec3 fk{};
      for (const auto& node : ball.nodes) {
        const Vec3 g = rho.grad_rho3(node.x - q);
        if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
        fk += (node.w * kirchhoff_field_exact(data, node.x, t).phi) * g;
      }
      parts.kirchhoff = fk;
    }
  }
  return parts;
}

Vec3 SelfForce::quadrature_route(const Vec3& q, double t) const {
  const ChargeDensity& rho = sc_->rho;
  if (rho.is_zero()) return {};
  const BallRule ball(q, rho.support_radius(), quad_.ball_r, quad_.ball_mu, quad_.ball_phi);
  Vec3 f{};
  for (const auto& node : ball.nodes) {
    const Vec3 g = rho.grad_rho3(node.x - q);
    if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
    const FieldSample s = field_eval(rho, *view_, sc_->field, node.x, t, order_);
    f += (node.w * s.phi) * g;
  }
  return f;
}

Vec3 self_force(const ChargeDensity& rho, const HistoryView& view, const FieldInitialData& d,
                const Vec3& q, double t, const QuadOrders& quad, int panel_order) {
  if (rho.is_zero()) return {};
  const BallRule ball(q, rho.support_radius(), quad.ball_r, quad.ball_mu, quad.ball_phi);
  Vec3 f{};
  for (const auto& node : ball.nodes) {
    const Vec3 g = rho.grad_rho3(node.x - q);
    if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
    f += (node.w * field_eval(rho, view, d, node.x, t, panel_order).phi) * g;
  }
  return f;
}

void rk4_step(const Scenario& sc, TrajectoryHistory& hist, Vec3& q, Vec3& p, double t, double dt,
              int panel_order, const QuadOrders& quad, ForceParts* parts_out) {
  HistoryView view(hist);
  const SelfForce force(sc, view, panel_order, quad);
  const double t_base = hist.end_time();

  auto rhs = [&](double ts, const Vec3& qs, const Vec3& ps, Vec3& dq, Vec3& dp) {
    if (ts > t_base)
      view.set_extension(ts, qs, ps);
    else
      view.clear_extension();
    dq = ps;
    dp = force.eval(qs, ts, sc.potential).total();
  };

  Vec3 k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
  rhs(t, q, p, k1q, k1p);
  rhs(t + 0.5 * dt, q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, k2q, k2p);
  rhs(t + 0.5 * dt, q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, k3q, k3p);
  rhs(t + dt, q + dt * k3q, p + dt * k3p, k4q, k4p);
  q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

  // acceleration stored at the new knot is the force at the completed state
  view.set_extension(t + dt, q, p);
  const ForceParts parts = force.eval(q, t + dt, sc.potential);
  if (parts_out) *parts_out = parts;
  hist.append(q, p, parts.total());
}

SimulationRecord simulate(const ScenarioConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  Scenario sc = build_scenario(cfg);
  const double R = sc.rho.support_radius();
  const double h = cfg.effective_step(R);
  if (!(h > 0.0)) throw std::invalid_argument("simulate: step must be positive");
  const auto steps = static_cast<long long>(std::llround(cfg.horizon / h));
  if (steps < 1 || std::fabs(cfg.horizon - static_cast<double>(steps) * h) > 1e-9 * cfg.horizon)
    throw std::invalid_argument("simulate: horizon must be a positive multiple of the step");
  const double escape = cfg.effective_escape(norm(cfg.q0));

  SimulationRecord rec{cfg, std::move(sc), TrajectoryHistory(h), {}, 0.0, 0.0, 0.01};
  rec.forces.reserve(static_cast<std::size_t>(steps) + 1);

  Vec3 q = cfg.q0, p = cfg.p0;
  rec.history.append(q, p, Vec3{});
  {
    HistoryView view(rec.history);
    const SelfForce force(rec.scenario, view, cfg.panel_order, cfg.quad);
    const ForceParts parts = force.eval(q, 0.0, rec.scenario.potential);
    rec.history.set_last_accel(parts.total());
    rec.forces.push_back(parts);
  }

  for (long long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * h;
    ForceParts parts;
    rk4_step(rec.scenario, rec.history, q, p, t, h, cfg.panel_order, cfg.quad, &parts);
    rec.forces.push_back(parts);
    if (!finite(q) || !finite(p)) {
      std::ostringstream os;
      os << "simulate: nonfinite state at t = " << t + h;
      throw std::runtime_error(os.str());
    }
    if (norm(q) > escape) {
      std::ostringstream os;
      os << "simulate: |q| = " << norm(q) << " exceeded the escape radius " << escape
         << " at t = " << t + h << " (contradicts confinement)";
      throw std::runtime_error(os.str());
    }
    if (cfg.plane_mode && std::fabs(q.z) + std::fabs(p.z) >= cfg.plane_tol) {
      std::ostringstream os;
      os << "simulate: plane-mode violation |q3|+|p3| = " << std::fabs(q.z) + std::fabs(p.z)
         << " at t = " << t + h;
      throw std::runtime_error(os.str());
    }
  }

  const double vbar = rec.history.speed_bound();
  if (vbar >= 1.0) {
    const double room = 1.0 - std::sqrt(1.0 - 1.0 / (vbar * vbar));
    rec.theta_eps = std::min(0.01, 0.5 * room);
    rec.theta = theta_threshold(vbar, rec.theta_eps);
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

RemainderValue nonlinear_remainder(const ChargeDensity& rho, const ConfiningPotential& V,
                                   double nu0_sq, const DeviationState& X,
                                   const QuadOrders& quad) {
  RemainderValue out;
  const Vec3 q = X.q;
  const double R = rho.support_radius();
  out.field_component = [rho, q](const Vec3& x) {
    return rho.rho3(x) - rho.rho3(x - q) - dot(rho.grad_rho3(x), q);
  };
  const Vec3 center = 0.5 * q;
  const double radius = R + 0.5 * norm(q);
  const BallRule ball(center, radius, quad.ball_r, quad.ball_mu, quad.ball_phi);
  double l2 = 0.0;
  Vec3 i1{}, i2{};
  for (const auto& node : ball.nodes) {
    const double bf = out.field_component(node.x);
    l2 += node.w * bf * bf;
    if (X.psi) i1 += (node.w * X.psi(node.x)) * (rho.grad_rho3(node.x - q) - rho.grad_rho3(node.x));
    const double r = norm(node.x);
    if (r > 1e-12 && bf != 0.0) i2 += (node.w * bf * rho.coulomb_grad(r) / r) * node.x;
  }
  out.field_l2 = std::sqrt(std::max(0.0, l2));
  out.particle_component = -V.gradient(q) + nu0_sq * q + i1 + i2;
  return out;
}

}  // namespace wavetrap

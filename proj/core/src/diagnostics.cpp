#include "wavetrap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavetrap {

double local_energy(const SimulationRecord& rec, double R, double t, const QuadOrders& quad,
                    int field_order) {
  const ChargeDensity& rho = rec.scenario.rho;
  const HistoryView view = rec.view();
  if (R <= view.radius_bound() + rho.support_radius())
    throw std::invalid_argument("local_energy: ball must contain the source support");
  const Kin k = view.state(t);

  double field = 0.0;
  const BallRule ball({}, R, quad.ball_r, quad.ball_mu, quad.ball_phi);
  for (const auto& node : ball.nodes) {
    const FieldSample s = field_eval(rho, view, rec.scenario.field, node.x, t, field_order);
    field += node.w * (s.pi * s.pi + dot(s.grad_phi, s.grad_phi));
  }

  double coupling = 0.0;
  if (!rho.is_zero()) {
    const BallRule src(k.q, rho.support_radius(), quad.ball_r, quad.ball_mu, quad.ball_phi);
    for (const auto& node : src.nodes) {
      const double rv = rho.rho3(node.x - k.q);
      if (rv == 0.0) continue;
      coupling += node.w * field_eval(rho, view, rec.scenario.field, node.x, t, field_order).phi * rv;
    }
  }

  return 0.5 * field + 0.5 * dot(k.v, k.v) + rec.scenario.potential.value(k.q) + coupling;
}

FluxBalance flux_balance(const SimulationRecord& rec, double R, double T0, double T1,
                         const QuadOrders& quad, int time_order, double time_panel,
                         int field_order) {
  if (!(T1 > T0)) throw std::invalid_argument("flux_balance: empty window");
  const double t0 = R + T0, t1 = R + T1;
  FluxBalance fb;
  fb.h_start = local_energy(rec, R, t0, quad, field_order);
  fb.h_end = local_energy(rec, R, t1, quad, field_order);
  fb.delta_h = fb.h_start - fb.h_end;

  const ChargeDensity& rho = rec.scenario.rho;
  const HistoryView view = rec.view();
  const SphereRule sphere(quad.sphere_mu, quad.sphere_phi);
  const double h = rec.step();
  // time panels respect both the knot grid and the requested resolution
  const int sub = std::max(1, static_cast<int>(std::floor(time_panel / h + 0.5)));
  double flux = 0.0;
  double a = t0;
  while (a < t1 - 1e-12) {
    const double b = std::min(t1, a + sub * h);
    knot_aligned_panels(h * sub, a, b, time_order, [&](double tq, double wq) {
      double shell = 0.0;
      for (const auto& node : sphere.nodes) {
        const Vec3 x = R * node.dir;
        const FieldSample s = field_eval(rho, view, rec.scenario.field, x, tq, field_order);
        shell += node.w * s.pi * dot(node.dir, s.grad_phi);
      }
      flux += wq * R * R * shell;
    });
    a = b;
  }
  fb.flux_out = -flux;
  fb.mismatch = std::fabs(fb.delta_h - fb.flux_out);
  return fb;
}

DiagnosticSeries radiation_functional(const SimulationRecord& rec, double t0, double t1, double dt,
                                      int sphere_mu, int sphere_phi, int field_order) {
  const ChargeDensity& rho = rec.scenario.rho;
  const HistoryView view = rec.view();
  const double cover = view.radius_bound() + rho.support_radius();
  const double lo = std::max(t0, cover);
  const double hi = std::min(t1, view.end_time() - cover);
  if (!(hi > lo)) throw std::invalid_argument("radiation_functional: empty covered window");

  const SphereRule sphere(sphere_mu, sphere_phi);
  DiagnosticSeries out;
  out.name = "radiated_energy_cumulative";
  out.meta["t0"] = lo;
  out.meta["t1"] = hi;
  out.meta["dt"] = dt;
  out.meta["coverage_margin"] = cover;

  auto shell_power = [&](double t) {
    double s = 0.0;
    for (const auto& node : sphere.nodes) {
      const double amp =
          farfield_amplitude(rho, view, node.dir, t, FarfieldRoute::Collapsed1D, field_order);
      s += node.w * amp * amp;
    }
    return s;
  };

  double acc = 0.0;
  double prev = shell_power(lo);
  out.push(lo, 0.0);
  for (double t = lo + dt; t <= hi + 1e-12; t += dt) {
    const double cur = shell_power(std::min(t, hi));
    acc += 0.5 * dt * (prev + cur);
    out.push(std::min(t, hi), acc);
    prev = cur;
  }
  return out;
}

namespace {

double invert_emission_time(const HistoryView& view, const Vec3& omega, double theta) {
  // solve theta = tau - omega . q(tau); monotone since omega . qdot < 1
  const double tend = view.end_time();
  const double qbar = view.radius_bound();
  double lo = std::max(0.0, theta - qbar - 1e-12), hi = std::min(tend, theta + qbar + 1e-12);
  auto g = [&](double tau) { return tau - dot(omega, view.position(tau)) - theta; };
  if (g(lo) > 1e-10 || g(hi) < -1e-10)
    throw std::out_of_range("g_omega: emission time outside the recorded history");
  double tau = std::clamp(theta, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const Kin k = view.state(tau);
    const double val = tau - dot(omega, k.q) - theta;
    const double der = 1.0 - dot(omega, k.v);
    double next = tau - val / der;
    if (next < lo || next > hi) next = 0.5 * (lo + hi);  // bisection safeguard
    if (val > 0.0) hi = tau;
    else lo = tau;
    if (std::fabs(next - tau) < 1e-14 * (1.0 + std::fabs(tau))) return next;
    tau = next;
  }
  return tau;
}

}  // namespace

double g_omega(const SimulationRecord& rec, const Vec3& omega, double theta) {
  if (std::fabs(omega.z) < rec.theta)
    throw std::invalid_argument("g_omega: direction outside the admissible cone");
  const HistoryView view = rec.view();
  if (view.history().speed_bound() * std::sqrt(1.0 - omega.z * omega.z) >= 1.0)
    throw std::invalid_argument("g_omega: omega . qdot can reach 1 for this direction");
  const double tau = invert_emission_time(view, omega, theta);
  const Kin k = view.state(tau);
  const double denom = 1.0 - dot(omega, k.v);
  return dot(omega, k.a) / (denom * denom * denom);
}

ConvolutionCheck convolution_check(const SimulationRecord& rec, const Vec3& omega, double t) {
  const ChargeDensity& rho = rec.scenario.rho;
  const HistoryView view = rec.view();
  ConvolutionCheck out;
  const double R = rho.support_radius();
  const int panels = std::max(16, static_cast<int>(std::ceil(2.0 * R / rec.step())));
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = t - R + 2.0 * R * p / panels;
    const double hi = t - R + 2.0 * R * (p + 1) / panels;
    acc += gauss_panel(
        [&](double theta) { return rho.axial_marginal(t - theta) * g_omega(rec, omega, theta); },
        lo, hi, 6);
  }
  // normalized like the far-field amplitude
  out.lhs = -acc / kFourPi;
  out.rhs = farfield_amplitude(rho, view, omega, t, FarfieldRoute::Collapsed1D,
                               rec.config.panel_order);
  out.diff = std::fabs(out.lhs - out.rhs);
  return out;
}

RelaxationSeries relaxation_series(const SimulationRecord& rec, double early_frac,
                                   double late_frac) {
  RelaxationSeries out;
  const TrajectoryHistory& hist = rec.history;
  out.speed.name = "speed";
  out.accel.name = "accel";
  const double T = hist.end_time();
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double t = static_cast<double>(i) * hist.step();
    const double v = norm(hist.knot_v(i));
    const double a = norm(hist.knot_a(i));
    out.speed.push(t, v);
    out.accel.push(t, a);
    out.peak_speed = std::max(out.peak_speed, v);
    if (t <= early_frac * T) out.early_envelope = std::max(out.early_envelope, v);
    if (t >= (1.0 - late_frac) * T) out.late_envelope = std::max(out.late_envelope, v);
  }
  out.envelope_ratio =
      out.early_envelope > 0.0 ? out.late_envelope / out.early_envelope
                               : (out.late_envelope > 0.0 ? std::numeric_limits<double>::infinity()
                                                          : 0.0);
  out.speed.meta["T"] = T;
  out.accel.meta["T"] = T;
  return out;
}

DiagnosticSeries envelope_series(const DiagnosticSeries& s, double window) {
  DiagnosticSeries out;
  out.name = s.name + "_envelope";
  out.meta = s.meta;
  out.meta["envelope_window"] = window;
  if (s.times.empty()) return out;
  double bin_start = s.times.front();
  double bin_max = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] >= bin_start + window) {
      if (any) out.push(bin_start + 0.5 * window, bin_max);
      bin_start += window * std::floor((s.times[i] - bin_start) / window);
      bin_max = 0.0;
      any = false;
    }
    bin_max = std::max(bin_max, s.values[i]);
    any = true;
  }
  if (any) out.push(bin_start + 0.5 * window, bin_max);
  return out;
}

WeightedNorm weighted_deviation_norm(const SimulationRecord& rec, double alpha, double t,
                                     double r_trunc, const QuadOrders& quad, int field_order) {
  if (!(alpha > 0.0)) throw std::invalid_argument("weighted_deviation_norm: alpha must be positive");
  const ChargeDensity& rho = rec.scenario.rho;
  const HistoryView view = rec.view();
  const double b = view.radius_bound() + rho.support_radius();
  if (r_trunc < 2.0 * b)
    throw std::invalid_argument("weighted_deviation_norm: truncation radius below 2 (qbar + R)");

  const Vec3 qmin = rec.scenario.potential.minimum;
  const Kin k = view.state(t);
  WeightedNorm out;
  out.r_trunc = r_trunc;

  const BallRule ball(qmin, r_trunc, quad.ball_r, quad.ball_mu, quad.ball_phi);
  double g2 = 0.0, p2 = 0.0;
  for (const auto& node : ball.nodes) {
    const FieldSample s = field_eval(rho, view, rec.scenario.field, node.x, t, field_order);
    const double r = norm(node.x - qmin);
    const Vec3 grad_dev =
        s.grad_phi - (r > 1e-12 ? (rho.coulomb_grad(r) / r) * (node.x - qmin) : Vec3{});
    const double w = std::pow(1.0 + norm(node.x), -2.0 * alpha);
    g2 += node.w * w * dot(grad_dev, grad_dev);
    p2 += node.w * w * s.pi * s.pi;
  }
  out.field_grad = std::sqrt(std::max(0.0, g2));
  out.field_pi = std::sqrt(std::max(0.0, p2));
  out.particle = norm(k.q - qmin) + norm(k.v);
  // coulomb-gradient tail of the truncated weighted integral
  const double Q = std::fabs(rho.total_charge());
  out.tail_bound = Q * std::pow(1.0 + r_trunc, -alpha) / std::sqrt(kFourPi * r_trunc);
  out.total = out.field_grad + out.field_pi + out.particle;
  return out;
}

DecayFit decay_fit(const DiagnosticSeries& series, double t_min, double t_max,
                   double alpha_target, double eps_tol) {
  if (!(t_min < t_max) || t_min <= 0.0)
    throw std::invalid_argument("decay_fit: need 0 < t_min < t_max");
  DecayFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.alpha_target = alpha_target;
  fit.eps_tol = eps_tol;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i], v = series.values[i];
    if (t < t_min || t > t_max || v < 1e-12) continue;
    const double x = std::log(t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 8) throw std::runtime_error("decay_fit: fewer than 8 usable points in the window");
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double inter = (sy - slope * sx) / n;
  fit.exponent = -slope;
  double rss = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i], v = series.values[i];
    if (t < t_min || t > t_max || v < 1e-12) continue;
    const double r = std::log(v) - (inter + slope * std::log(t));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.points = n;
  fit.upper_bound_consistent = fit.exponent >= alpha_target - eps_tol;
  return fit;
}

ScatteringRemainder scattering_remainder(const SimulationRecord& rec, double alpha,
                                         double converged_tol) {
  const RelaxationSeries relax = relaxation_series(rec);
  const bool converged = relax.late_envelope < 1e-10 ||
                         relax.late_envelope <= converged_tol * std::max(relax.peak_speed, 1e-12);
  if (!converged)
    throw std::runtime_error(
        "scattering_remainder: run has not relaxed (trailing speed envelope too large)");

  const ChargeDensity& rho = rec.scenario.rho;
  const Vec3 qmin = rec.scenario.potential.minimum;
  const TrajectoryHistory& hist = rec.history;
  ScatteringRemainder out;
  out.source_norm.name = "source_difference_norm";
  out.source_norm.meta["alpha"] = alpha;
  const double c0 = rho.autocorrelation(0.0);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double t = static_cast<double>(i) * hist.step();
    const double d = norm(hist.knot_q(i) - qmin);
    out.source_norm.push(t, std::sqrt(std::max(0.0, 2.0 * (c0 - rho.autocorrelation(d)))));
  }

  const double T = hist.end_time();
  // decay fit of the source-norm envelope drives the tail extrapolation
  const DiagnosticSeries env = envelope_series(out.source_norm, std::max(8.0 * hist.step(), T / 64.0));
  double beta_r = 0.0;
  try {
    beta_r = decay_fit(env, 0.25 * T, T, alpha, 0.25).exponent;
  } catch (const std::exception&) {
    beta_r = 0.0;  // too few usable points (e.g. stationary run): tail is zero anyway
  }
  const double last = out.source_norm.values.back();
  out.tail_extrapolation = beta_r > 1.05 ? last * T / (beta_r - 1.0) : last * T;

  // backward cumulative integral of ||R|| plus the extrapolated tail
  out.bound.name = "remainder_bound";
  out.bound.meta["alpha"] = alpha;
  out.bound.meta["tail_extrapolation"] = out.tail_extrapolation;
  std::vector<double> acc(hist.size(), 0.0);
  for (std::size_t i = hist.size() - 1; i > 0; --i) {
    acc[i - 1] = acc[i] + 0.5 * hist.step() *
                              (out.source_norm.values[i] + out.source_norm.values[i - 1]);
  }
  for (std::size_t i = 0; i < hist.size(); ++i)
    out.bound.push(out.source_norm.times[i], acc[i] + out.tail_extrapolation);

  try {
    const DiagnosticSeries benv = envelope_series(out.bound, std::max(8.0 * hist.step(), T / 64.0));
    out.fitted_exponent = decay_fit(benv, 0.2 * T, 0.8 * T, alpha - 1.0, 0.25).exponent;
  } catch (const std::exception&) {
    out.fitted_exponent = 0.0;
  }
  return out;
}

}  // namespace wavetrap

#include "wavetrap/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wavetrap/charge_analysis.hpp"
#include "wavetrap/csvio.hpp"

namespace wavetrap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const FullConfig& cfg) {
  json j;
  std::istringstream lines(serialize_config(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq - 1);
    const std::string value = line.substr(eq + 2);
    char* end = nullptr;
    const double num = std::strtod(value.c_str(), &end);
    if (end && *end == '\0' && end != value.c_str())
      j[key] = num;
    else
      j[key] = value;
  }
  return j;
}

FullConfig config_from_json(const json& j) {
  std::ostringstream text;
  text.precision(17);
  for (const auto& [key, value] : j.items()) {
    if (value.is_string())
      text << key << " = " << value.get<std::string>() << "\n";
    else
      text << key << " = " << value.get<double>() << "\n";
  }
  return parse_config(text.str());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double diag_of(const FullConfig& cfg, const std::string& key) {
  const auto it = cfg.diag.find(key);
  if (it == cfg.diag.end()) throw std::logic_error("missing diagnostic default: " + key);
  return it->second;
}

void stamp_quad(CsvTable& table, const QuadOrders& q, double h) {
  table.meta["quad.ball_r"] = q.ball_r;
  table.meta["quad.ball_mu"] = q.ball_mu;
  table.meta["quad.ball_phi"] = q.ball_phi;
  table.meta["quad.sphere_mu"] = q.sphere_mu;
  table.meta["quad.sphere_phi"] = q.sphere_phi;
  table.meta["h"] = h;
}

// spread directions over the admissible cone (both caps), golden-angle azimuth
std::vector<Vec3> cone_directions(int count, double theta_min) {
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double z_lo = std::min(0.98, std::max(theta_min, 0.35));
  const double z_hi = 0.98;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double frac = count > 1 ? static_cast<double>(i) / (count - 1) : 0.5;
    double z = z_lo + (z_hi - z_lo) * frac;
    if (i % 2 == 1) z = -z;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i + 0.37;
    dirs.push_back(Vec3{s * std::cos(phi), s * std::sin(phi), z});
  }
  return dirs;
}

}  // namespace

std::string RunManifest::to_json() const {
  json j;
  j["scenario_id"] = scenario_id;
  j["config"] = config_path;
  j["out"] = out_dir;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  j["subcommands"] = json::array();
  for (const auto& sub : subcommands) {
    json s;
    s["name"] = sub.name;
    s["params"] = json::object();
    for (const auto& [k, v] : sub.params) s["params"][k] = v;
    j["subcommands"].push_back(s);
  }
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  json j = json::parse(text);
  RunManifest m;
  m.scenario_id = j.value("scenario_id", "");
  m.config_path = j.value("config", "");
  m.out_dir = j.value("out", "");
  m.seed = j.value("seed", 0u);
  m.tool_version = j.value("tool_version", kToolVersion);
  if (j.contains("subcommands"))
    for (const auto& s : j["subcommands"]) {
      SubcommandSpec sub;
      sub.name = s.at("name").get<std::string>();
      if (s.contains("params"))
        for (const auto& [k, v] : s["params"].items()) sub.params[k] = v.get<double>();
      m.subcommands.push_back(std::move(sub));
    }
  return m;
}

RunManifest RunManifest::load(const std::string& path) { return from_json(read_text(path)); }

void RunManifest::save(const std::string& path) const { write_text(path, to_json()); }

void write_run_artifact(const SimulationRecord& rec, const FullConfig& cfg,
                        const std::string& dir) {
  fs::create_directories(dir);
  const TrajectoryHistory& hist = rec.history;

  CsvTable run;
  run.columns = {"t", "q1", "q2", "q3", "v1", "v2", "v3", "a1", "a2", "a3"};
  run.meta["h"] = hist.step();
  run.meta["T"] = hist.end_time();
  run.meta["speed_bound"] = hist.speed_bound();
  run.meta["radius_bound"] = hist.radius_bound();
  run.meta["theta"] = rec.theta;
  run.meta["panel_order"] = rec.config.panel_order;
  run.meta["seed"] = rec.config.seed;
  stamp_quad(run, rec.config.quad, hist.step());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const Vec3& q = hist.knot_q(i);
    const Vec3& v = hist.knot_v(i);
    const Vec3& a = hist.knot_a(i);
    run.add_row({static_cast<double>(i) * hist.step(), q.x, q.y, q.z, v.x, v.y, v.z, a.x, a.y, a.z});
  }
  write_csv(dir + "/run.csv", run);

  CsvTable forces;
  forces.columns = {"t", "fpot1", "fpot2", "fpot3", "fself1", "fself2",
                    "fself3", "fkirch1", "fkirch2", "fkirch3"};
  forces.meta["h"] = hist.step();
  for (std::size_t i = 0; i < rec.forces.size(); ++i) {
    const ForceParts& f = rec.forces[i];
    forces.add_row({static_cast<double>(i) * hist.step(), f.potential.x, f.potential.y,
                    f.potential.z, f.self.x, f.self.y, f.self.z, f.kirchhoff.x, f.kirchhoff.y,
                    f.kirchhoff.z});
  }
  write_csv(dir + "/forces.csv", forces);

  json snapshot;
  snapshot["config"] = config_to_json(cfg);
  snapshot["tool_version"] = kToolVersion;
  write_text(dir + "/config.json", snapshot.dump(2) + "\n");
}

FullConfig load_artifact_config(const std::string& dir) {
  const json snapshot = json::parse(read_text(dir + "/config.json"));
  if (!snapshot.contains("config"))
    throw std::runtime_error("run artifact: config.json lacks a config snapshot");
  return config_from_json(snapshot["config"]);
}

SimulationRecord load_run_artifact(const std::string& dir) {
  FullConfig cfg = load_artifact_config(dir);

  const CsvTable run = read_csv(dir + "/run.csv");
  if (run.columns != std::vector<std::string>{"t", "q1", "q2", "q3", "v1", "v2", "v3", "a1", "a2",
                                              "a3"})
    throw std::runtime_error("run artifact: unexpected run.csv columns");
  if (run.rows.size() < 2) throw std::runtime_error("run artifact: too few knots");
  const double h = run.rows[1][0] - run.rows[0][0];
  if (!(h > 0.0)) throw std::runtime_error("run artifact: knot times not increasing");

  Scenario sc = build_scenario(cfg.scenario);
  SimulationRecord rec{cfg.scenario, std::move(sc), TrajectoryHistory(h), {}, 0.0, 0.0, 0.01};
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    const auto& r = run.rows[i];
    const double t_expect = static_cast<double>(i) * h;
    if (std::fabs(r[0] - t_expect) > 1e-9 * (1.0 + t_expect))
      throw std::runtime_error("run artifact: knots not uniformly spaced");
    for (double v : r)
      if (!std::isfinite(v)) throw std::runtime_error("run artifact: nonfinite entry in run.csv");
    rec.history.append(Vec3{r[1], r[2], r[3]}, Vec3{r[4], r[5], r[6]}, Vec3{r[7], r[8], r[9]});
  }

  if (fs::exists(dir + "/forces.csv")) {
    const CsvTable forces = read_csv(dir + "/forces.csv");
    if (forces.rows.size() != run.rows.size())
      throw std::runtime_error("run artifact: forces.csv length mismatch");
    for (std::size_t i = 0; i < forces.rows.size(); ++i) {
      const auto& r = forces.rows[i];
      ForceParts p;
      p.potential = Vec3{r[1], r[2], r[3]};
      p.self = Vec3{r[4], r[5], r[6]};
      p.kirchhoff = Vec3{r[7], r[8], r[9]};
      const Vec3 resid = p.total() - rec.history.knot_a(i);
      if (norm(resid) > 1e-9 * (1.0 + norm(rec.history.knot_a(i))))
        throw std::runtime_error("run artifact: force parts do not sum to the stored acceleration");
      rec.forces.push_back(p);
    }
  }

  const double vbar = rec.history.speed_bound();
  if (vbar >= 1.0) {
    const double room = 1.0 - std::sqrt(1.0 - 1.0 / (vbar * vbar));
    rec.theta_eps = std::min(0.01, 0.5 * room);
    rec.theta = theta_threshold(vbar, rec.theta_eps);
  }
  return rec;
}

CommandOutput cmd_simulate(const FullConfig& cfg, const std::string& out,
                           std::optional<SimulationRecord>* record_slot) {
  CommandOutput res;
  SimulationRecord rec = simulate(cfg.scenario);
  write_run_artifact(rec, cfg, out);
  res.artifacts = {out + "/run.csv", out + "/forces.csv", out + "/config.json"};

  double plane_max = 0.0;
  for (std::size_t i = 0; i < rec.history.size(); ++i)
    plane_max = std::max(plane_max,
                         std::fabs(rec.history.knot_q(i).z) + std::fabs(rec.history.knot_v(i).z));
  if (cfg.scenario.plane_mode)
    res.checks.push_back({"plane_invariance", plane_max < cfg.scenario.plane_tol, plane_max,
                          cfg.scenario.plane_tol});
  res.checks.push_back({"run_completed", true, rec.history.end_time(), cfg.scenario.horizon});
  if (record_slot) *record_slot = std::move(rec);
  return res;
}

CommandOutput cmd_wiener(const FullConfig& cfg, const std::string& out) {
  CommandOutput res;
  const ChargeDensity rho =
      charge_catalog(cfg.scenario.rho_kind, cfg.scenario.rho_params, cfg.scenario.quad);
  double k_max = diag_of(cfg, "wiener.k_max");
  if (k_max <= 0.0) k_max = 20.0 * 2.0 * kPi / rho.support_radius();
  const int samples = static_cast<int>(diag_of(cfg, "wiener.samples"));
  double threshold = diag_of(cfg, "wiener.threshold");
  if (threshold < 0.0) threshold = 1e-4 * std::fabs(rho.total_charge());
  const WienerReport rep = wiener_scan(rho, k_max, samples, threshold);
  fs::create_directories(out);
  write_text(out + "/wiener.json", rep.to_json() + "\n");
  res.artifacts = {out + "/wiener.json"};
  const bool gate = diag_of(cfg, "wiener.gate") != 0.0;
  res.checks.push_back({"wiener_verdict", gate ? rep.verdict : true, rep.min_abs, threshold});
  return res;
}

CommandOutput cmd_farfield(const SimulationRecord& rec, const FullConfig& cfg,
                           const std::string& out) {
  CommandOutput res;
  const HistoryView view = rec.view();
  const double cover = view.radius_bound() + rec.scenario.rho.support_radius();
  double t_min = diag_of(cfg, "farfield.t_min");
  double t_max = diag_of(cfg, "farfield.t_max");
  if (t_min < cover) t_min = cover;
  if (t_max <= 0.0 || t_max > view.end_time() - cover) t_max = view.end_time() - cover;
  const int nt = std::max(2, static_cast<int>(diag_of(cfg, "farfield.t_count")));
  const int nw = std::max(1, static_cast<int>(diag_of(cfg, "farfield.omega_count")));
  const bool with_cone = diag_of(cfg, "farfield.cone") != 0.0;

  CsvTable table;
  table.columns = {"t", "omega1", "omega2", "omega3", "pibar", "formula"};
  table.meta["theta"] = rec.theta;
  table.meta["coverage_margin"] = cover;
  stamp_quad(table, rec.config.quad, rec.step());
  table.meta_note = "formula: 0 = general, 1 = cone";

  double worst = 0.0;
  for (const Vec3& om : cone_directions(nw, rec.theta)) {
    for (int i = 0; i < nt; ++i) {
      const double t = t_min + (t_max - t_min) * i / (nt - 1);
      const double general = farfield_amplitude(rec.scenario.rho, view, om, t,
                                                FarfieldRoute::Collapsed1D, rec.config.panel_order);
      table.add_row({t, om.x, om.y, om.z, general, 0.0});
      if (with_cone) {
        const double cone =
            farfield_amplitude_cone(rec.scenario.rho, view, om, t, FarfieldRoute::Collapsed1D,
                                    rec.theta_eps, nullptr, rec.config.panel_order);
        table.add_row({t, om.x, om.y, om.z, cone, 1.0});
        const double rel =
            std::fabs(general - cone) / std::max({std::fabs(general), std::fabs(cone), 1e-8});
        worst = std::max(worst, rel);
      }
    }
  }
  fs::create_directories(out);
  write_csv(out + "/farfield.csv", table);
  res.artifacts = {out + "/farfield.csv"};
  if (with_cone) res.checks.push_back({"farfield_consistency", worst <= 1e-3, worst, 1e-3});
  return res;
}

CommandOutput cmd_audit(const SimulationRecord& rec, const FullConfig& cfg,
                        const std::string& out) {
  CommandOutput res;
  const double R = diag_of(cfg, "audit.R");
  const double T0 = diag_of(cfg, "audit.T0");
  const double T1 = diag_of(cfg, "audit.T1");
  const double tp = diag_of(cfg, "audit.time_panel");
  const FluxBalance fb = flux_balance(rec, R, T0, T1, rec.config.quad, 8, tp);
  const double tol = 1e-3 * (std::fabs(fb.delta_h) + std::fabs(fb.flux_out)) + 1e-6;

  CsvTable table;
  table.columns = {"R", "t0", "t1", "H_start", "H_end", "delta_H", "flux_out", "mismatch"};
  stamp_quad(table, rec.config.quad, rec.step());
  table.meta["time_panel"] = tp;
  table.add_row({R, R + T0, R + T1, fb.h_start, fb.h_end, fb.delta_h, fb.flux_out, fb.mismatch});
  res.checks.push_back({"energy_balance", fb.mismatch <= tol, fb.mismatch, tol});

  if (diag_of(cfg, "audit.refine") != 0.0) {
    FullConfig fine = cfg;
    fine.scenario.step = rec.step() * 0.5;
    fine.scenario.quad.ball_r *= 2;
    fine.scenario.quad.ball_mu *= 2;
    fine.scenario.quad.ball_phi *= 2;
    fine.scenario.quad.sphere_mu *= 2;
    fine.scenario.quad.sphere_phi *= 2;
    fine.scenario.horizon = std::min(rec.config.horizon, R + T1 + 2.0 * rec.step());
    // horizon must stay a multiple of the refined step
    fine.scenario.horizon = std::ceil(fine.scenario.horizon / fine.scenario.step) * fine.scenario.step;
    const SimulationRecord fine_rec = simulate(fine.scenario);
    const FluxBalance fb2 = flux_balance(fine_rec, R, T0, T1, fine.scenario.quad, 8, 0.5 * tp);
    table.add_row({R, R + T0, R + T1, fb2.h_start, fb2.h_end, fb2.delta_h, fb2.flux_out,
                   fb2.mismatch});
    res.checks.push_back({"energy_balance_refinement", fb2.mismatch < fb.mismatch, fb2.mismatch,
                          fb.mismatch});
  }
  fs::create_directories(out);
  write_csv(out + "/audit.csv", table);
  res.artifacts = {out + "/audit.csv"};
  return res;
}

CommandOutput cmd_radiation(const SimulationRecord& rec, const FullConfig& cfg,
                            const std::string& out) {
  CommandOutput res;
  double t0 = diag_of(cfg, "radiation.t0");
  double t1 = diag_of(cfg, "radiation.t1");
  if (t1 <= 0.0) t1 = rec.history.end_time();
  const double dt = diag_of(cfg, "radiation.dt");
  const DiagnosticSeries series = radiation_functional(rec, t0, t1, dt, rec.config.quad.sphere_mu,
                                                       rec.config.quad.sphere_phi);
  CsvTable table;
  table.columns = {"T", "radiated_energy"};
  table.meta = series.meta;
  stamp_quad(table, rec.config.quad, rec.step());
  bool monotone = true;
  for (std::size_t i = 0; i < series.size(); ++i) {
    table.add_row({series.times[i], series.values[i]});
    if (i > 0 && series.values[i] < series.values[i - 1] - 1e-14) monotone = false;
  }
  fs::create_directories(out);
  write_csv(out + "/radiation.csv", table);
  res.artifacts = {out + "/radiation.csv"};
  res.checks.push_back({"radiation_monotone", monotone,
                        series.values.empty() ? 0.0 : series.values.back(), 0.0});
  return res;
}

CommandOutput cmd_ratefit(const SimulationRecord& rec, const FullConfig& cfg,
                          const std::string& out) {
  CommandOutput res;
  const double alpha = diag_of(cfg, "ratefit.alpha");
  const double eps = diag_of(cfg, "ratefit.eps");
  const double T = rec.history.end_time();
  double t_min = diag_of(cfg, "ratefit.t_min");
  double t_max = diag_of(cfg, "ratefit.t_max");
  if (t_min <= 0.0) t_min = 0.25 * T;
  if (t_max <= 0.0) t_max = T;
  double window = diag_of(cfg, "ratefit.window");
  const double nu0 = std::sqrt(rec.scenario.potential.nu0_sq);
  if (window <= 0.0) window = 2.0 * kPi / nu0;

  const RelaxationSeries relax = relaxation_series(rec);
  const DiagnosticSeries env = envelope_series(relax.speed, window);
  const DecayFit speed_fit = decay_fit(env, t_min, t_max, alpha, eps);

  // weighted deviation norm sampled across the fit window
  const double cover = rec.view().radius_bound() + rec.scenario.rho.support_radius();
  double r_trunc = diag_of(cfg, "ratefit.norm_rtrunc");
  if (r_trunc <= 0.0) r_trunc = 2.0 * cover + 2.0;
  const double norm_alpha = diag_of(cfg, "ratefit.norm_alpha");
  const int nsamp = std::max(8, static_cast<int>(diag_of(cfg, "ratefit.norm_samples")));
  DiagnosticSeries norms;
  norms.name = "weighted_deviation_norm";
  norms.meta["alpha"] = norm_alpha;
  norms.meta["r_trunc"] = r_trunc;
  double tail = 0.0;
  for (int i = 0; i < nsamp; ++i) {
    const double t = t_min + (t_max - t_min) * i / (nsamp - 1);
    const WeightedNorm wn = weighted_deviation_norm(rec, norm_alpha, t, r_trunc, rec.config.quad);
    norms.push(t, wn.total);
    tail = wn.tail_bound;
  }
  norms.meta["tail_bound"] = tail;
  const DecayFit norm_fit = decay_fit(norms, t_min, t_max, alpha, eps);

  CsvTable table;
  table.columns = {"t", "series", "value"};
  table.meta["alpha_target"] = alpha;
  table.meta["eps_tol"] = eps;
  table.meta["speed_exponent"] = speed_fit.exponent;
  table.meta["norm_exponent"] = norm_fit.exponent;
  table.meta["envelope_window"] = window;
  table.meta["r_trunc"] = r_trunc;
  table.meta["tail_bound"] = tail;
  stamp_quad(table, rec.config.quad, rec.step());
  table.meta_note = "series: 0 = |qdot| envelope, 1 = weighted deviation norm";
  for (std::size_t i = 0; i < env.size(); ++i) table.add_row({env.times[i], 0.0, env.values[i]});
  for (std::size_t i = 0; i < norms.size(); ++i)
    table.add_row({norms.times[i], 1.0, norms.values[i]});
  fs::create_directories(out);
  write_csv(out + "/ratefit.csv", table);
  res.artifacts = {out + "/ratefit.csv"};
  res.checks.push_back({"ratefit_speed_upper_bound", speed_fit.upper_bound_consistent,
                        speed_fit.exponent, alpha - eps});
  res.checks.push_back({"ratefit_norm_upper_bound", norm_fit.upper_bound_consistent,
                        norm_fit.exponent, alpha - eps});
  return res;
}

CommandOutput cmd_scatter(const SimulationRecord& rec, const FullConfig& cfg,
                          const std::string& out) {
  CommandOutput res;
  const double alpha = diag_of(cfg, "scatter.alpha");
  const double ctol = diag_of(cfg, "scatter.converged_tol");
  const ScatteringRemainder sr = scattering_remainder(rec, alpha, ctol);

  CsvTable table;
  table.columns = {"t", "series", "value"};
  table.meta["alpha"] = alpha;
  table.meta["tail_extrapolation"] = sr.tail_extrapolation;
  table.meta["fitted_exponent"] = sr.fitted_exponent;
  stamp_quad(table, rec.config.quad, rec.step());
  table.meta_note = "series: 0 = source difference norm, 1 = remainder bound";
  for (std::size_t i = 0; i < sr.source_norm.size(); i += 8)
    table.add_row({sr.source_norm.times[i], 0.0, sr.source_norm.values[i]});
  for (std::size_t i = 0; i < sr.bound.size(); i += 8)
    table.add_row({sr.bound.times[i], 1.0, sr.bound.values[i]});
  fs::create_directories(out);
  write_csv(out + "/scatter.csv", table);
  res.artifacts = {out + "/scatter.csv"};
  const double want = alpha - 1.0 - 0.25;
  res.checks.push_back({"scatter_exponent", sr.fitted_exponent >= want, sr.fitted_exponent, want});
  return res;
}

CommandOutput cmd_linear(const FullConfig& cfg, const std::string& out) {
  CommandOutput res;
  const ChargeDensity rho =
      charge_catalog(cfg.scenario.rho_kind, cfg.scenario.rho_params, cfg.scenario.quad);
  const ConfiningPotential V =
      potential_catalog(cfg.scenario.potential_kind, cfg.scenario.potential_params);
  LinearConfig lc;
  lc.nu0_sq = V.nu0_sq;
  lc.Q0 = Vec3{diag_of(cfg, "linear.Q1"), diag_of(cfg, "linear.Q2"), diag_of(cfg, "linear.Q3")};
  lc.P0 = Vec3{diag_of(cfg, "linear.P1"), diag_of(cfg, "linear.P2"), diag_of(cfg, "linear.P3")};
  lc.step = diag_of(cfg, "linear.h");
  lc.horizon = diag_of(cfg, "linear.T");
  lc.panel_order = cfg.scenario.panel_order;
  lc.quad = cfg.scenario.quad;
  const LinearRecord rec = linear_simulate(rho, lc);

  double r_trunc = diag_of(cfg, "linear.RE");
  if (r_trunc <= 0.0) r_trunc = lc.horizon + rho.support_radius() + 1.0;
  const int nsamp = std::max(3, static_cast<int>(diag_of(cfg, "linear.samples")));

  CsvTable table;
  table.columns = {"t", "Q1", "Q2", "Q3", "P1", "P2", "P3", "H0", "tail_bound"};
  table.meta["RE"] = r_trunc;
  table.meta["nu1_sq"] = rec.nu1_sq;
  stamp_quad(table, lc.quad, lc.step);
  double h0_ref = 0.0, drift = 0.0;
  for (int i = 0; i < nsamp; ++i) {
    const double t = lc.horizon * i / (nsamp - 1);
    const LinearEnergy e = linear_energy(rec, t, r_trunc);
    const Kin k = rec.history.interpolate(t);
    table.add_row({t, k.q.x, k.q.y, k.q.z, k.v.x, k.v.y, k.v.z, e.total, e.tail_bound});
    if (i == 0) h0_ref = e.total;
    else drift = std::max(drift, std::fabs(e.total - h0_ref) / std::max(1e-300, std::fabs(h0_ref)));
  }
  fs::create_directories(out);
  write_csv(out + "/linear.csv", table);
  res.artifacts = {out + "/linear.csv"};
  res.checks.push_back({"h0_drift", drift < 1e-5, drift, 1e-5});
  return res;
}

ExecutionResult execute(const RunManifest& manifest) {
  ExecutionResult result;
  if (manifest.out_dir.empty()) throw std::invalid_argument("execute: manifest lacks an output dir");
  fs::create_directories(manifest.out_dir);
  FullConfig cfg = load_config_file(manifest.config_path);
  cfg.scenario.seed = manifest.seed;

  std::optional<SimulationRecord> record;
  auto ensure_record = [&]() -> const SimulationRecord& {
    if (!record) {
      const CommandOutput out = cmd_simulate(cfg, manifest.out_dir, &record);
      result.checks.insert(result.checks.end(), out.checks.begin(), out.checks.end());
      result.artifacts.insert(result.artifacts.end(), out.artifacts.begin(), out.artifacts.end());
    }
    return *record;
  };

  for (const auto& sub : manifest.subcommands) {
    FullConfig local = cfg;
    for (const auto& [k, v] : sub.params) {
      if (!local.diag.count(k))
        throw std::invalid_argument("execute: unknown subcommand parameter '" + k + "'");
      local.diag[k] = v;
    }
    CommandOutput out;
    if (sub.name == "simulate") {
      ensure_record();
      continue;
    } else if (sub.name == "wiener") {
      out = cmd_wiener(local, manifest.out_dir);
    } else if (sub.name == "farfield") {
      out = cmd_farfield(ensure_record(), local, manifest.out_dir);
    } else if (sub.name == "audit") {
      out = cmd_audit(ensure_record(), local, manifest.out_dir);
    } else if (sub.name == "radiation") {
      out = cmd_radiation(ensure_record(), local, manifest.out_dir);
    } else if (sub.name == "ratefit") {
      out = cmd_ratefit(ensure_record(), local, manifest.out_dir);
    } else if (sub.name == "scatter") {
      out = cmd_scatter(ensure_record(), local, manifest.out_dir);
    } else if (sub.name == "linear") {
      out = cmd_linear(local, manifest.out_dir);
    } else {
      throw std::invalid_argument("execute: unknown subcommand '" + sub.name + "'");
    }
    result.checks.insert(result.checks.end(), out.checks.begin(), out.checks.end());
    result.artifacts.insert(result.artifacts.end(), out.artifacts.begin(), out.artifacts.end());
  }

  json summary;
  summary["scenario_id"] = manifest.scenario_id;
  summary["tool_version"] = kToolVersion;
  summary["seed"] = manifest.seed;
  summary["checks"] = json::array();
  bool all_pass = true;
  for (const auto& c : result.checks) {
    json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    summary["checks"].push_back(jc);
    all_pass = all_pass && c.pass;
  }
  if (record) {
    const TrajectoryHistory& hist = record->history;
    const Vec3 qmin = record->scenario.potential.minimum;
    summary["final_distance_to_minimum"] = norm(hist.knot_q(hist.size() - 1) - qmin);
    summary["speed_bound"] = hist.speed_bound();
    summary["theta"] = record->theta;
    summary["wall_seconds"] = record->wall_seconds;
  }
  summary["failures"] = json::array();
  for (const auto& c : result.checks)
    if (!c.pass) summary["failures"].push_back(c.name);
  write_text(manifest.out_dir + "/summary.json", summary.dump(2) + "\n");
  result.artifacts.push_back(manifest.out_dir + "/summary.json");
  result.exit_code = all_pass ? 0 : 1;
  return result;
}

}  // namespace wavetrap

#include "wavetrap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavetrap {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: key '" + key + "' expects true/false, got '" + value + "'");
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

const std::map<std::string, double>& rho_param_keys() {
  static const std::map<std::string, double> keys{
      {"radius", 1.0}, {"charge", 1.0}, {"width", 0.0}};
  return keys;
}

}  // namespace

const std::map<std::string, double>& diagnostic_defaults() {
  static const std::map<std::string, double> defaults{
      {"audit.R", 6.0},
      {"audit.T0", 0.0},
      {"audit.T1", 20.0},
      {"audit.time_panel", 0.1},
      {"audit.refine", 0.0},
      {"farfield.omega_count", 20.0},
      {"farfield.t_min", 0.0},
      {"farfield.t_max", 0.0},  // 0: use the covered window
      {"farfield.t_count", 20.0},
      {"farfield.cone", 1.0},
      {"radiation.t0", 0.0},
      {"radiation.t1", 0.0},  // 0: run horizon
      {"radiation.dt", 0.5},
      {"ratefit.alpha", 1.5},
      {"ratefit.eps", 0.25},
      {"ratefit.t_min", 0.0},  // 0: T/4
      {"ratefit.t_max", 0.0},  // 0: T
      {"ratefit.window", 0.0},  // 0: one oscillation period estimate
      {"ratefit.norm_alpha", 1.5},
      {"ratefit.norm_rtrunc", 0.0},  // 0: 2(qbar+R)+2
      {"ratefit.norm_samples", 33.0},
      {"scatter.alpha", 1.5},
      {"scatter.converged_tol", 0.05},
      {"wiener.k_max", 0.0},  // 0: 20 * 2 pi / R
      {"wiener.samples", 2048.0},
      {"wiener.threshold", -1.0},  // <0: 1e-4 * |Q|
      {"wiener.gate", 0.0},
      {"linear.Q1", 1.0},
      {"linear.Q2", 0.0},
      {"linear.Q3", 0.0},
      {"linear.P1", 0.0},
      {"linear.P2", 0.0},
      {"linear.P3", 0.0},
      {"linear.h", 0.02},
      {"linear.T", 100.0},
      {"linear.samples", 51.0},
      {"linear.RE", 0.0},  // 0: T + R + 1
  };
  return defaults;
}

FullConfig parse_config(const std::string& text) {
  FullConfig cfg;
  cfg.diag = diagnostic_defaults();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config: line " << lineno << " is not a key=value pair: '" << line << "'";
      throw std::invalid_argument(os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    ScenarioConfig& sc = cfg.scenario;

    if (key == "rho.kind") sc.rho_kind = value;
    else if (starts_with(key, "rho.") && rho_param_keys().count(key.substr(4)))
      sc.rho_params[key.substr(4)] = parse_number(key, value);
    else if (key == "potential.kind") sc.potential_kind = value;
    else if (key == "potential.nu0" || key == "potential.lambda")
      sc.potential_params[key.substr(10)] = parse_number(key, value);
    else if (key == "init.q1") sc.q0.x = parse_number(key, value);
    else if (key == "init.q2") sc.q0.y = parse_number(key, value);
    else if (key == "init.q3") sc.q0.z = parse_number(key, value);
    else if (key == "init.p1") sc.p0.x = parse_number(key, value);
    else if (key == "init.p2") sc.p0.y = parse_number(key, value);
    else if (key == "init.p3") sc.p0.z = parse_number(key, value);
    else if (key == "field.kind") sc.field_kind = value;
    else if (key == "field.center1" || key == "field.center2" || key == "field.center3" ||
             key == "field.radius" || key == "field.phi_amp" || key == "field.pi_amp" ||
             key == "field.edge")
      sc.field_params[key.substr(6)] = parse_number(key, value);
    else if (key == "run.h") sc.step = parse_number(key, value);
    else if (key == "run.T") sc.horizon = parse_number(key, value);
    else if (key == "run.plane") sc.plane_mode = parse_bool(key, value);
    else if (key == "run.plane_tol") sc.plane_tol = parse_number(key, value);
    else if (key == "run.escape_radius") sc.escape_radius = parse_number(key, value);
    else if (key == "run.panel_order") sc.panel_order = static_cast<int>(parse_number(key, value));
    else if (key == "run.seed") sc.seed = static_cast<unsigned>(parse_number(key, value));
    else if (key == "quad.ball_r") sc.quad.ball_r = static_cast<int>(parse_number(key, value));
    else if (key == "quad.ball_mu") sc.quad.ball_mu = static_cast<int>(parse_number(key, value));
    else if (key == "quad.ball_phi") sc.quad.ball_phi = static_cast<int>(parse_number(key, value));
    else if (key == "quad.sphere_mu") sc.quad.sphere_mu = static_cast<int>(parse_number(key, value));
    else if (key == "quad.sphere_phi")
      sc.quad.sphere_phi = static_cast<int>(parse_number(key, value));
    else if (cfg.diag.count(key)) cfg.diag[key] = parse_number(key, value);
    else {
      std::ostringstream os;
      os << "config: unknown key '" << key << "' (line " << lineno << ")";
      throw std::invalid_argument(os.str());
    }
  }

  // constraint validation, each error naming key and constraint
  const ScenarioConfig& sc = cfg.scenario;
  if (sc.plane_mode && sc.q0.z != 0.0)
    throw std::invalid_argument(
        "config: init.q3 must be 0 when run.plane = true (planar-motion constraint)");
  if (sc.plane_mode && sc.p0.z != 0.0)
    throw std::invalid_argument(
        "config: init.p3 must be 0 when run.plane = true (planar-motion constraint)");
  if (sc.plane_mode) {
    auto it = sc.field_params.find("center3");
    if (it != sc.field_params.end() && it->second != 0.0)
      throw std::invalid_argument(
          "config: field.center3 must be 0 when run.plane = true (fields must be even in x3)");
  }
  if (sc.step < 0.0) throw std::invalid_argument("config: run.h must be positive");
  if (sc.horizon <= 0.0) throw std::invalid_argument("config: run.T must be positive");
  if (sc.quad.ball_r < 2 || sc.quad.ball_mu < 2 || sc.quad.ball_phi < 4 || sc.quad.sphere_mu < 2 ||
      sc.quad.sphere_phi < 4)
    throw std::invalid_argument("config: quadrature orders too small");
  return cfg;
}

std::string serialize_config(const FullConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  const ScenarioConfig& sc = cfg.scenario;
  os << "rho.kind = " << sc.rho_kind << "\n";
  for (const auto& [k, v] : sc.rho_params) os << "rho." << k << " = " << v << "\n";
  os << "potential.kind = " << sc.potential_kind << "\n";
  for (const auto& [k, v] : sc.potential_params) os << "potential." << k << " = " << v << "\n";
  os << "init.q1 = " << sc.q0.x << "\n";
  os << "init.q2 = " << sc.q0.y << "\n";
  os << "init.q3 = " << sc.q0.z << "\n";
  os << "init.p1 = " << sc.p0.x << "\n";
  os << "init.p2 = " << sc.p0.y << "\n";
  os << "init.p3 = " << sc.p0.z << "\n";
  os << "field.kind = " << sc.field_kind << "\n";
  for (const auto& [k, v] : sc.field_params) os << "field." << k << " = " << v << "\n";
  os << "run.h = " << sc.step << "\n";
  os << "run.T = " << sc.horizon << "\n";
  os << "run.plane = " << (sc.plane_mode ? "true" : "false") << "\n";
  os << "run.plane_tol = " << sc.plane_tol << "\n";
  os << "run.escape_radius = " << sc.escape_radius << "\n";
  os << "run.panel_order = " << sc.panel_order << "\n";
  os << "run.seed = " << sc.seed << "\n";
  os << "quad.ball_r = " << sc.quad.ball_r << "\n";
  os << "quad.ball_mu = " << sc.quad.ball_mu << "\n";
  os << "quad.ball_phi = " << sc.quad.ball_phi << "\n";
  os << "quad.sphere_mu = " << sc.quad.sphere_mu << "\n";
  os << "quad.sphere_phi = " << sc.quad.sphere_phi << "\n";
  const auto& defaults = diagnostic_defaults();
  for (const auto& [k, v] : cfg.diag) {
    const auto it = defaults.find(k);
    if (it == defaults.end() || it->second != v) os << k << " = " << v << "\n";
  }
  return os.str();
}

FullConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace wavetrap

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavetrap/config.hpp"
#include "wavetrap/diagnostics.hpp"
#include "wavetrap/linear_dynamics.hpp"

namespace wavetrap {

inline constexpr const char* kToolVersion = "wavetrap 0.1.0";

struct SubcommandSpec {
  std::string name;
  std::map<std::string, double> params;  // overrides for the config's diag block
};

/// Batch description: which scenario to run and which diagnostics to apply.
struct RunManifest {
  std::string scenario_id;
  std::string config_path;
  std::string out_dir;
  std::vector<SubcommandSpec> subcommands;
  unsigned seed = 0;
  std::string tool_version = kToolVersion;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::string& path);
  void save(const std::string& path) const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct ExecutionResult {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;
};

/// Run artifact: knots CSV + forces CSV + JSON config snapshot.
void write_run_artifact(const SimulationRecord& rec, const FullConfig& cfg,
                        const std::string& dir);
SimulationRecord load_run_artifact(const std::string& dir);
FullConfig load_artifact_config(const std::string& dir);

struct CommandOutput {
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;
};

CommandOutput cmd_simulate(const FullConfig& cfg, const std::string& out,
                           std::optional<SimulationRecord>* record_slot = nullptr);
CommandOutput cmd_wiener(const FullConfig& cfg, const std::string& out);
CommandOutput cmd_farfield(const SimulationRecord& rec, const FullConfig& cfg,
                           const std::string& out);
CommandOutput cmd_audit(const SimulationRecord& rec, const FullConfig& cfg, const std::string& out);
CommandOutput cmd_radiation(const SimulationRecord& rec, const FullConfig& cfg,
                            const std::string& out);
CommandOutput cmd_ratefit(const SimulationRecord& rec, const FullConfig& cfg,
                          const std::string& out);
CommandOutput cmd_scatter(const SimulationRecord& rec, const FullConfig& cfg,
                          const std::string& out);
CommandOutput cmd_linear(const FullConfig& cfg, const std::string& out);

/// Run the manifest: simulate once, apply the requested diagnostics, write
/// summary.json. Exit code 0 iff every requested property check passed.
ExecutionResult execute(const RunManifest& manifest);

}  // namespace wavetrap

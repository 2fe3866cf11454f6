#pragma once

#include <map>
#include <string>

#include "wavetrap/dynamics.hpp"

namespace wavetrap {

/// Parsed config file: the scenario plus the per-diagnostic parameter block.
/// Keys are `section.name`; unknown keys are fatal (silent typos in physics
/// parameters are the dominant failure mode).
struct FullConfig {
  ScenarioConfig scenario;
  std::map<std::string, double> diag;  // whitelisted diagnostic parameters
};

/// Parse UTF-8 `key = value` lines with '#' comments. Applies defaults,
/// validates constraints (each error names the offending key), and rejects
/// unknown keys.
FullConfig parse_config(const std::string& text);

/// Inverse of parse_config: emits every non-default key, sorted, such that
/// parse(serialize(c)) == c.
std::string serialize_config(const FullConfig& cfg);

FullConfig load_config_file(const std::string& path);

/// Documented diagnostic keys and their defaults (also the parse whitelist).
const std::map<std::string, double>& diagnostic_defaults();

}  // namespace wavetrap

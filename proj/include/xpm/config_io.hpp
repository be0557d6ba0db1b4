#pragma once

#include <stdexcept>
#include <string>

#include "xpm/engine.hpp"
#include "xpm/explorer.hpp"

namespace xpm {

/// Errors from reading or interpreting configuration and scenario files.
/// The kind maps onto the process exit codes of the command line tool.
struct ConfigError : std::runtime_error {
  enum class Kind { io, parse, validation };
  Kind kind;
  ConfigError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// All defaults: the reference experiment of the shipped configs.
ExperimentConfig default_config();

/// Parses and validates a config from JSON text. Angular-frequency fields
/// use the _rad_s suffix; detunings may instead be given as ordinary
/// frequencies with _hz and are multiplied by 2 pi on load. Unknown keys are
/// rejected. Missing fields take defaults; an empty object is valid.
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form, every field explicit in _rad_s units.
/// parse_config(config_to_json_text(c)) reproduces c exactly.
std::string config_to_json_text(const ExperimentConfig& cfg, int indent = 2);

/// FNV-1a 64 over the canonical JSON text, as "fnv1a64:<hex>".
std::string config_hash(const ExperimentConfig& cfg);

ScalingScenario load_scenario(const std::string& path);
ScalingScenario parse_scenario(const std::string& json_text);
std::string projection_to_json_text(const ScalingScenario& s,
                                    const ScalingProjection& p);

struct ResultBundle {
  std::string timeseries_csv;
  std::string summary_json;
  std::string config_json;
};

/// Writes timeseries.csv, summary.json and config_resolved.json into
/// out_dir (created as needed). CSV is UTF-8, LF line endings, 17
/// significant digits.
ResultBundle write_run_result(const ExperimentConfig& cfg, const RunResult& res,
                              const std::string& out_dir);

struct SweepBundle {
  std::string sweep_csv;
  std::string summary_json;
  std::string config_json;
};

SweepBundle write_sweep_result(const ExperimentConfig& cfg, SweepParam param,
                               const SweepResult& res, const std::string& out_dir);

const char* sweep_param_name(SweepParam param);
SweepParam sweep_param_from_name(const std::string& name);

}  // namespace xpm

#include "xpm/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xpm/version.hpp"

namespace xpm {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(ConfigError::Kind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw ConfigError(ConfigError::Kind::io, "cannot read " + path);
  return ss.str();
}

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ConfigError(ConfigError::Kind::parse, "malformed JSON");
  return j;
}

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw ConfigError(ConfigError::Kind::validation, path + ": " + why);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad_field(path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      bad_field(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

void get_num(const json& obj, const std::string& path, const char* key,
             double& dst) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_number()) bad_field(full, "expected a number");
  dst = v.get<double>();
}

void get_int(const json& obj, const std::string& path, const char* key, int& dst) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_number_integer()) bad_field(full, "expected an integer");
  dst = v.get<int>();
}

void get_u64(const json& obj, const std::string& path, const char* key,
             std::uint64_t& dst) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_number_integer()) bad_field(full, "expected an integer");
  dst = v.get<std::uint64_t>();
}

void get_bool(const json& obj, const std::string& path, const char* key,
              bool& dst) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_boolean()) bad_field(full, "expected a boolean");
  dst = v.get<bool>();
}

void get_str(const json& obj, const std::string& path, const char* key,
             std::string& dst) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_string()) bad_field(full, "expected a string");
  dst = v.get<std::string>();
}

// A detuning may be written as angular frequency (_rad_s) or ordinary
// frequency (_hz, multiplied by 2 pi on load), but not both.
void get_detuning(const json& obj, const std::string& path, const char* rad_key,
                  const char* hz_key, double& dst) {
  if (obj.contains(rad_key) && obj.contains(hz_key))
    bad_field(path + "." + std::string(rad_key),
              std::string("give either this or ") + hz_key + ", not both");
  if (obj.contains(rad_key)) {
    get_num(obj, path, rad_key, dst);
  } else if (obj.contains(hz_key)) {
    double hz = 0.0;
    get_num(obj, path, hz_key, hz);
    dst = 2.0 * constants::pi * hz;
  }
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  // Ensemble density and two-photon detuning below were calibrated so the
  // reference run reproduces the target peak phase at the sweep optimum; see
  // the README's calibration section and tools/xpm_calibrate.
  cfg.label = "default";
  cfg.cavity.waist = confocal_waist(cfg.cavity.length, cfg.atomic.lambda_c);
  cfg.medium.density = 9.411e16;
  cfg.detunings.delta = -7e7;
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  expect_object(j, "config");

  reject_unknown(j, "",
                 {"schema_version", "label", "atomic", "cavity", "medium",
                  "control_pulse", "probe_pulse", "detunings", "doppler",
                  "integrator", "acquisition_time_s", "control_phase_enabled",
                  "field_model"});

  ExperimentConfig cfg = default_config();
  get_int(j, "", "schema_version", cfg.schema_version);
  get_str(j, "", "label", cfg.label);

  if (j.contains("atomic")) {
    const json& a = j.at("atomic");
    expect_object(a, "atomic");
    reject_unknown(a, "atomic",
                   {"gamma1_per_s", "gamma2_per_s", "gamma0_per_s",
                    "Gamma10_per_s", "Gamma21_per_s", "mu10_cm", "mu21_cm",
                    "lambda_c_m", "lambda_p_m"});
    get_num(a, "atomic", "gamma1_per_s", cfg.atomic.gamma1);
    get_num(a, "atomic", "gamma2_per_s", cfg.atomic.gamma2);
    get_num(a, "atomic", "gamma0_per_s", cfg.atomic.gamma0);
    get_num(a, "atomic", "Gamma10_per_s", cfg.atomic.Gamma10);
    get_num(a, "atomic", "Gamma21_per_s", cfg.atomic.Gamma21);
    get_num(a, "atomic", "mu10_cm", cfg.atomic.mu10);
    get_num(a, "atomic", "mu21_cm", cfg.atomic.mu21);
    get_num(a, "atomic", "lambda_c_m", cfg.atomic.lambda_c);
    get_num(a, "atomic", "lambda_p_m", cfg.atomic.lambda_p);
  }

  bool waist_given = false;
  if (j.contains("cavity")) {
    const json& c = j.at("cavity");
    expect_object(c, "cavity");
    reject_unknown(c, "cavity", {"length_m", "r_mirror", "t_mirror", "waist_m"});
    get_num(c, "cavity", "length_m", cfg.cavity.length);
    get_num(c, "cavity", "r_mirror", cfg.cavity.r_mirror);
    get_num(c, "cavity", "t_mirror", cfg.cavity.t_mirror);
    if (c.contains("waist_m")) {
      waist_given = true;
      get_num(c, "cavity", "waist_m", cfg.cavity.waist);
    }
  }
  if (!waist_given)
    cfg.cavity.waist = confocal_waist(cfg.cavity.length, cfg.atomic.lambda_c);

  if (j.contains("medium")) {
    const json& m = j.at("medium");
    expect_object(m, "medium");
    reject_unknown(m, "medium", {"density_per_m3", "doppler_fwhm_hz"});
    get_num(m, "medium", "density_per_m3", cfg.medium.density);
    get_num(m, "medium", "doppler_fwhm_hz", cfg.medium.doppler_fwhm);
  }

  const auto read_pulse = [&](const char* key, PulseSpec& p) {
    if (!j.contains(key)) return;
    const json& o = j.at(key);
    expect_object(o, key);
    reject_unknown(o, key, {"energy_j", "duration_s", "delay_s", "edge_time_s"});
    get_num(o, key, "energy_j", p.energy);
    get_num(o, key, "duration_s", p.duration);
    get_num(o, key, "delay_s", p.delay);
    get_num(o, key, "edge_time_s", p.edge_time);
  };
  read_pulse("control_pulse", cfg.control_pulse);
  read_pulse("probe_pulse", cfg.probe_pulse);

  if (j.contains("detunings")) {
    const json& d = j.at("detunings");
    expect_object(d, "detunings");
    reject_unknown(d, "detunings",
                   {"Delta_rad_s", "Delta_hz", "delta_rad_s", "delta_hz"});
    get_detuning(d, "detunings", "Delta_rad_s", "Delta_hz", cfg.detunings.Delta);
    get_detuning(d, "detunings", "delta_rad_s", "delta_hz", cfg.detunings.delta);
  }

  if (j.contains("doppler")) {
    const json& d = j.at("doppler");
    expect_object(d, "doppler");
    reject_unknown(d, "doppler", {"mode", "n_groups", "method", "seed"});
    std::string mode;
    get_str(d, "doppler", "mode", mode);
    if (!mode.empty()) {
      if (mode == "off")
        cfg.doppler.mode = DopplerMode::off;
      else if (mode == "free")
        cfg.doppler.mode = DopplerMode::free_running;
      else if (mode == "residual")
        cfg.doppler.mode = DopplerMode::residual;
      else
        bad_field("doppler.mode", "expected one of off, free, residual");
    }
    get_int(d, "doppler", "n_groups", cfg.doppler.n_groups);
    std::string method;
    get_str(d, "doppler", "method", method);
    if (!method.empty()) {
      if (method == "monte_carlo")
        cfg.doppler.method = SampleMethod::monte_carlo;
      else if (method == "quadrature")
        cfg.doppler.method = SampleMethod::quadrature;
      else
        bad_field("doppler.method", "expected monte_carlo or quadrature");
    }
    get_u64(d, "doppler", "seed", cfg.doppler.seed);
  }

  if (j.contains("integrator")) {
    const json& i = j.at("integrator");
    expect_object(i, "integrator");
    reject_unknown(i, "integrator", {"dt_s", "t_end_s"});
    get_num(i, "integrator", "dt_s", cfg.integrator.dt);
    get_num(i, "integrator", "t_end_s", cfg.integrator.t_end);
  }

  get_num(j, "", "acquisition_time_s", cfg.acquisition_time);
  get_bool(j, "", "control_phase_enabled", cfg.control_phase_enabled);

  std::string model;
  get_str(j, "", "field_model", model);
  if (!model.empty()) {
    if (model == "linearized")
      cfg.field_model = CavityFieldModel::linearized;
    else if (model == "exact")
      cfg.field_model = CavityFieldModel::exact;
    else
      bad_field("field_model", "expected linearized or exact");
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ConfigError::Kind::validation, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

std::string config_to_json_text(const ExperimentConfig& cfg, int indent) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["label"] = cfg.label;
  j["atomic"] = {{"gamma1_per_s", cfg.atomic.gamma1},
                 {"gamma2_per_s", cfg.atomic.gamma2},
                 {"gamma0_per_s", cfg.atomic.gamma0},
                 {"Gamma10_per_s", cfg.atomic.Gamma10},
                 {"Gamma21_per_s", cfg.atomic.Gamma21},
                 {"mu10_cm", cfg.atomic.mu10},
                 {"mu21_cm", cfg.atomic.mu21},
                 {"lambda_c_m", cfg.atomic.lambda_c},
                 {"lambda_p_m", cfg.atomic.lambda_p}};
  j["cavity"] = {{"length_m", cfg.cavity.length},
                 {"r_mirror", cfg.cavity.r_mirror},
                 {"t_mirror", cfg.cavity.t_mirror},
                 {"waist_m", cfg.cavity.waist}};
  j["medium"] = {{"density_per_m3", cfg.medium.density},
                 {"doppler_fwhm_hz", cfg.medium.doppler_fwhm}};
  j["control_pulse"] = {{"energy_j", cfg.control_pulse.energy},
                        {"duration_s", cfg.control_pulse.duration},
                        {"delay_s", cfg.control_pulse.delay},
                        {"edge_time_s", cfg.control_pulse.edge_time}};
  j["probe_pulse"] = {{"energy_j", cfg.probe_pulse.energy},
                      {"duration_s", cfg.probe_pulse.duration},
                      {"delay_s", cfg.probe_pulse.delay},
                      {"edge_time_s", cfg.probe_pulse.edge_time}};
  j["detunings"] = {{"Delta_rad_s", cfg.detunings.Delta},
                    {"delta_rad_s", cfg.detunings.delta}};
  const char* mode = cfg.doppler.mode == DopplerMode::off ? "off"
                     : cfg.doppler.mode == DopplerMode::free_running ? "free"
                                                                     : "residual";
  j["doppler"] = {{"mode", mode},
                  {"n_groups", cfg.doppler.n_groups},
                  {"method", cfg.doppler.method == SampleMethod::monte_carlo
                                 ? "monte_carlo"
                                 : "quadrature"},
                  {"seed", cfg.doppler.seed}};
  j["integrator"] = {{"dt_s", cfg.integrator.dt}, {"t_end_s", cfg.integrator.t_end}};
  j["acquisition_time_s"] = cfg.acquisition_time;
  j["control_phase_enabled"] = cfg.control_phase_enabled;
  j["field_model"] =
      cfg.field_model == CavityFieldModel::linearized ? "linearized" : "exact";
  return j.dump(indent) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json_text(cfg, -1);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ScalingScenario parse_scenario(const std::string& json_text) {
  const json j = parse_json(json_text);
  expect_object(j, "scenario");
  reject_unknown(j, "scenario",
                 {"schema_version", "label", "baseline_length_m", "new_length_m",
                  "fixed_quality", "dipole_old_cm", "dipole_new_cm",
                  "doppler_gain", "baseline_phase_per_photon_rad"});
  ScalingScenario s;
  int schema = 1;
  get_int(j, "scenario", "schema_version", schema);
  if (schema != 1)
    bad_field("scenario.schema_version", "unsupported value");
  get_str(j, "scenario", "label", s.label);
  get_num(j, "scenario", "baseline_length_m", s.baseline_length);
  get_num(j, "scenario", "new_length_m", s.new_length);
  get_bool(j, "scenario", "fixed_quality", s.fixed_quality);
  get_num(j, "scenario", "dipole_old_cm", s.dipole_old);
  get_num(j, "scenario", "dipole_new_cm", s.dipole_new);
  get_num(j, "scenario", "doppler_gain", s.doppler_gain);
  get_num(j, "scenario", "baseline_phase_per_photon_rad",
          s.baseline_phase_per_photon);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ConfigError::Kind::validation, e.what());
  }
  return s;
}

ScalingScenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path));
}

std::string projection_to_json_text(const ScalingScenario& s,
                                    const ScalingProjection& p) {
  json j;
  j["label"] = s.label;
  j["qv_enhancement"] = p.qv_enhancement;
  j["dipole_gain"] = p.dipole_gain;
  j["doppler_gain"] = p.doppler_gain;
  j["baseline_phase_per_photon_rad"] = s.baseline_phase_per_photon;
  j["projected_phase_rad"] = p.projected_phase;
  j["note"] =
      "multiplicative estimate: independent Q/V, dipole and Doppler factors "
      "applied to the baseline per-photon phase; not a dynamical simulation "
      "of the scaled design";
  // Independently published dynamical figure for a 2.5 mm, finesse 30000
  // lambda-scheme design, for comparison only; this tool does not produce it.
  j["reference_lambda_scheme_phase_rad"] = 6e-4;
  j["tool_version"] = tool_version;
  return j.dump(2) + "\n";
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(ConfigError::Kind::io, "cannot write " + path);
  out << text;
  if (!out) throw ConfigError(ConfigError::Kind::io, "cannot write " + path);
}

std::string ensure_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw ConfigError(ConfigError::Kind::io,
                      "cannot create directory " + out_dir + ": " + ec.message());
  return out_dir;
}

json summary_json(const ExperimentConfig& cfg, const RunResult& res) {
  const RunSummary& s = res.summary;
  const RunDiagnostics& d = res.diagnostics;
  json j;
  j["label"] = cfg.label;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.doppler.seed;
  j["n_groups"] = d.group_velocity.size();
  j["acquisition_time_s"] = cfg.acquisition_time;
  j["peak_phase_rad"] = s.peak_phase;
  j["phase_at_acquisition_rad"] = s.phase_at_acquisition;
  j["optimal_acquisition_time_s"] = s.optimal_acquisition_time;
  j["photons_in_control_pulse"] = s.photons_in_control_pulse;
  j["phase_per_photon_rad"] = s.phase_per_photon;
  j["diagnostics"] = {
      {"pop_min", d.pop_min},
      {"pop_max", d.pop_max},
      {"max_trace_step_increase", d.max_trace_step_increase},
      {"coherence_warnings", d.coherence_warnings},
      {"probe_photon_peak", d.probe_photon_peak},
      {"probe_photon_bound", d.probe_photon_bound},
      {"photon_bound_ok", d.photon_bound_ok},
      {"residual_two_photon_fwhm_hz", d.residual_two_photon_fwhm_hz},
      {"mc_peak_phase_se_rad", d.mc_peak_phase_se}};
  return j;
}

}  // namespace

ResultBundle write_run_result(const ExperimentConfig& cfg, const RunResult& res,
                              const std::string& out_dir) {
  ensure_dir(out_dir);
  ResultBundle b;
  b.timeseries_csv = out_dir + "/timeseries.csv";
  b.summary_json = out_dir + "/summary.json";
  b.config_json = out_dir + "/config_resolved.json";

  std::FILE* f = std::fopen(b.timeseries_csv.c_str(), "wb");
  if (!f)
    throw ConfigError(ConfigError::Kind::io, "cannot write " + b.timeseries_csv);
  std::fputs(
      "t_s,pop1,pop2,Ec_mag,Ep_mag,Ep_out_mag,delta_phi_rad,homodyne_norm\n", f);
  for (std::size_t i = 0; i < res.time.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 res.time[i], res.pop1[i], res.pop2[i], res.ec_mag[i],
                 res.ep_mag[i], res.ep_out_mag[i], res.delta_phi[i],
                 res.homodyne[i]);
  std::fclose(f);

  write_text_file(b.summary_json, summary_json(cfg, res).dump(2) + "\n");
  write_text_file(b.config_json, config_to_json_text(cfg));
  return b;
}

const char* sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::delta: return "delta";
    case SweepParam::Delta: return "Delta";
    case SweepParam::control_energy: return "control_energy";
  }
  return "delta";
}

SweepParam sweep_param_from_name(const std::string& name) {
  if (name == "delta") return SweepParam::delta;
  if (name == "Delta") return SweepParam::Delta;
  if (name == "control_energy") return SweepParam::control_energy;
  throw ConfigError(ConfigError::Kind::validation,
                    "param: expected delta, Delta or control_energy");
}

SweepBundle write_sweep_result(const ExperimentConfig& cfg, SweepParam param,
                               const SweepResult& res, const std::string& out_dir) {
  ensure_dir(out_dir);
  SweepBundle b;
  b.sweep_csv = out_dir + "/sweep.csv";
  b.summary_json = out_dir + "/sweep_summary.json";
  b.config_json = out_dir + "/config_resolved.json";

  const char* col = param == SweepParam::delta          ? "delta_rad_s"
                    : param == SweepParam::Delta        ? "Delta_rad_s"
                                                        : "control_energy_j";
  std::FILE* f = std::fopen(b.sweep_csv.c_str(), "wb");
  if (!f) throw ConfigError(ConfigError::Kind::io, "cannot write " + b.sweep_csv);
  std::fprintf(f, "%s,phase_rad\n", col);
  for (const auto& p : res.curve)
    std::fprintf(f, "%.17g,%.17g\n", p.value, p.phase);
  std::fclose(f);

  json j;
  j["label"] = cfg.label;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.doppler.seed;
  j["param"] = sweep_param_name(param);
  j["n_points"] = res.curve.size();
  j["peak_abs_phase_rad"] = res.peak_abs_phase;
  const char* star = param == SweepParam::delta          ? "delta_star_rad_s"
                     : param == SweepParam::Delta        ? "Delta_star_rad_s"
                                                         : "control_energy_star_j";
  j[star] = res.best_value;
  write_text_file(b.summary_json, j.dump(2) + "\n");
  write_text_file(b.config_json, config_to_json_text(cfg));
  return b;
}

}  // namespace xpm

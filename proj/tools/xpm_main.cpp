// Command line front end: run one experiment, sweep a parameter, project a
// design scaling, or just validate a config.
//
// Exit codes: 0 success, 10 file I/O, 11 malformed JSON, 12 invalid values,
// 20 numerical blow-up.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "xpm/config_io.hpp"
#include "xpm/version.hpp"

namespace {

int thread_count(int cli_threads) {
  // XPM_THREADS wins over --threads so batch schedulers can cap usage.
  if (const char* env = std::getenv("XPM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return cli_threads;
}

std::vector<double> linspace(double from, double to, int steps) {
  std::vector<double> v;
  v.reserve(steps);
  if (steps == 1) {
    v.push_back(from);
    return v;
  }
  for (int i = 0; i < steps; ++i)
    v.push_back(from + (to - from) * static_cast<double>(i) / (steps - 1));
  return v;
}

int exit_code_for(const xpm::ConfigError& e) {
  switch (e.kind) {
    case xpm::ConfigError::Kind::io: return 10;
    case xpm::ConfigError::Kind::parse: return 11;
    case xpm::ConfigError::Kind::validation: return 12;
  }
  return 12;
}

void apply_seed(xpm::ExperimentConfig& cfg, bool seed_set, std::uint64_t seed) {
  if (seed_set) cfg.doppler.seed = seed;
}

void warn_mirrors(const xpm::ExperimentConfig& cfg) {
  if (auto w = cfg.cavity.consistency_warning())
    std::fprintf(stderr, "warning: %s\n", w->c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity cross-phase-modulation simulator"};
  app.set_version_flag("--version", std::string(xpm::tool_version));
  app.require_subcommand(1);

  std::string config_path, out_dir = "xpm_out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    if (with_out) sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the velocity-sampler seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  CLI::App* run = app.add_subcommand("run", "simulate one experiment");
  add_common(run, true);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter");
  std::string param;
  double from = 0.0, to = 0.0;
  int steps = 0;
  sweep->add_option("--param", param, "delta | Delta | control_energy")->required();
  sweep->add_option("--from", from, "first value (rad/s, or J for energy)")
      ->required();
  sweep->add_option("--to", to, "last value")->required();
  sweep->add_option("--steps", steps, "number of points")->required();
  add_common(sweep, true);

  CLI::App* scale = app.add_subcommand("scale", "project a design scaling");
  std::string scenario_path;
  std::string scale_out;
  scale->add_option("scenario", scenario_path, "scaling scenario (JSON)")
      ->required();
  scale->add_option("--out", scale_out, "optional output directory");

  CLI::App* validate = app.add_subcommand("validate", "check a config and exit");
  validate->add_option("config", config_path, "experiment config (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      xpm::ExperimentConfig cfg = xpm::load_config(config_path);
      apply_seed(cfg, seed_set, seed);
      warn_mirrors(cfg);
      const xpm::RunResult res =
          xpm::simulate(cfg, {thread_count(threads)});
      const xpm::ResultBundle b = xpm::write_run_result(cfg, res, out_dir);
      std::printf("peak_phase_rad %.6g\n", res.summary.peak_phase);
      std::printf("phase_at_acquisition_rad %.6g\n",
                  res.summary.phase_at_acquisition);
      std::printf("optimal_acquisition_time_s %.6g\n",
                  res.summary.optimal_acquisition_time);
      std::printf("wrote %s\n", b.timeseries_csv.c_str());
      std::printf("wrote %s\n", b.summary_json.c_str());
      std::printf("wrote %s\n", b.config_json.c_str());
      return 0;
    }

    if (sweep->parsed()) {
      if (steps < 1)
        throw xpm::ConfigError(xpm::ConfigError::Kind::validation,
                               "steps: must be >= 1");
      const xpm::SweepParam p = xpm::sweep_param_from_name(param);
      xpm::ExperimentConfig cfg = xpm::load_config(config_path);
      apply_seed(cfg, seed_set, seed);
      warn_mirrors(cfg);
      const xpm::SweepResult res =
          xpm::sweep_param(cfg, p, linspace(from, to, steps),
                           {thread_count(threads)});
      const xpm::SweepBundle b = xpm::write_sweep_result(cfg, p, res, out_dir);
      std::printf("best_%s %.17g\n", param.c_str(), res.best_value);
      std::printf("peak_abs_phase_rad %.6g\n", res.peak_abs_phase);
      std::printf("wrote %s\n", b.sweep_csv.c_str());
      std::printf("wrote %s\n", b.summary_json.c_str());
      return 0;
    }

    if (scale->parsed()) {
      const xpm::ScalingScenario s = xpm::load_scenario(scenario_path);
      const xpm::ScalingProjection p = xpm::project_single_photon_phase(s);
      const std::string text = xpm::projection_to_json_text(s, p);
      std::fputs(text.c_str(), stdout);
      if (!scale_out.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(scale_out, ec);
        if (ec)
          throw xpm::ConfigError(xpm::ConfigError::Kind::io,
                                 "cannot create directory " + scale_out);
        std::ofstream out(scale_out + "/scale_summary.json", std::ios::binary);
        if (!out)
          throw xpm::ConfigError(xpm::ConfigError::Kind::io,
                                 "cannot write " + scale_out +
                                     "/scale_summary.json");
        out << text;
      }
      return 0;
    }

    if (validate->parsed()) {
      const xpm::ExperimentConfig cfg = xpm::load_config(config_path);
      warn_mirrors(cfg);
      std::printf("OK %s\n", xpm::config_hash(cfg).c_str());
      return 0;
    }
  } catch (const xpm::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const xpm::NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 20;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 12;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

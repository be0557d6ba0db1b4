#include "xpm/explorer.hpp"

#include <cmath>
#include <stdexcept>

namespace xpm {

void ScalingScenario::validate() const {
  if (!(baseline_length > 0))
    throw std::invalid_argument("scenario.baseline_length_m: must be > 0");
  if (!(new_length > 0))
    throw std::invalid_argument("scenario.new_length_m: must be > 0");
  if (!(dipole_old > 0))
    throw std::invalid_argument("scenario.dipole_old_cm: must be > 0");
  if (!(dipole_new > 0))
    throw std::invalid_argument("scenario.dipole_new_cm: must be > 0");
  if (!(doppler_gain > 0))
    throw std::invalid_argument("scenario.doppler_gain: must be > 0");
  if (!(baseline_phase_per_photon >= 0))
    throw std::invalid_argument(
        "scenario.baseline_phase_per_photon_rad: must be >= 0");
}

double qv_enhancement(double baseline_length, double new_length,
                      bool fixed_quality) {
  if (!(baseline_length > 0 && new_length > 0))
    throw std::invalid_argument("qv_enhancement: lengths must be > 0");
  const double ratio = baseline_length / new_length;
  return fixed_quality ? std::pow(ratio, 1.5) : ratio;
}

double dipole_gain(double mu_new, double mu_old) {
  if (!(mu_new > 0 && mu_old > 0))
    throw std::invalid_argument("dipole_gain: dipole moments must be > 0");
  const double r = mu_new / mu_old;
  return r * r;
}

DopplerGainResult doppler_free_gain(const ExperimentConfig& cfg,
                                    const std::vector<double>& deltas,
                                    const ExecutionPolicy& exec) {
  DopplerGainResult out;
  ExperimentConfig free_cfg = cfg;
  free_cfg.doppler.mode = DopplerMode::free_running;
  ExperimentConfig res_cfg = cfg;
  res_cfg.doppler.mode = DopplerMode::residual;

  out.free_curve = sweep_delta(free_cfg, deltas, exec);
  out.residual_curve = sweep_delta(res_cfg, deltas, exec);
  if (out.residual_curve.peak_abs_phase > 0.0)
    out.gain = out.free_curve.peak_abs_phase / out.residual_curve.peak_abs_phase;
  return out;
}

ScalingProjection project_single_photon_phase(const ScalingScenario& s) {
  s.validate();
  ScalingProjection p;
  p.qv_enhancement = qv_enhancement(s.baseline_length, s.new_length, s.fixed_quality);
  p.dipole_gain = dipole_gain(s.dipole_new, s.dipole_old);
  p.doppler_gain = s.doppler_gain;
  p.projected_phase =
      s.baseline_phase_per_photon * p.qv_enhancement * p.dipole_gain * p.doppler_gain;
  return p;
}

}  // namespace xpm

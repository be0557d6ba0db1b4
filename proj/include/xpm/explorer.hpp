#pragma once

#include <string>
#include <vector>

#include "xpm/engine.hpp"

namespace xpm {

/// Inputs for a what-if projection of the per-photon phase: shrink the
/// resonator, swap the probe transition, remove the residual Doppler spread.
struct ScalingScenario {
  std::string label;
  double baseline_length = 0.025;  // m
  double new_length = 0.025;      // m
  bool fixed_quality = true;      // raise finesse with 1/L to hold Q constant
  double dipole_old = 1.2e-30;    // C*m
  double dipole_new = 1.2e-30;    // C*m
  double doppler_gain = 1.0;      // measured or assumed free/residual ratio
  double baseline_phase_per_photon = 3e-7;  // rad

  void validate() const;
};

struct ScalingProjection {
  double qv_enhancement = 1.0;
  double dipole_gain = 1.0;
  double doppler_gain = 1.0;
  double projected_phase = 0.0;  // rad per photon
};

/// Q/V figure-of-merit gain from shortening the cavity. At constant quality
/// factor the finesse rises as L0/L1 while the confocal mode volume shrinks
/// as (L1/L0)^2, so the gain is (L0/L1)^{3/2}; at fixed finesse Q falls with
/// the lifetime and only L0/L1 survives.
double qv_enhancement(double baseline_length, double new_length,
                      bool fixed_quality = true);

/// Interaction-strength gain of a stronger probe transition, (mu_new/mu_old)^2.
double dipole_gain(double mu_new, double mu_old);

struct DopplerGainResult {
  double gain = 1.0;
  SweepResult free_curve;
  SweepResult residual_curve;
};

/// Ratio of peak |phase| over a two-photon detuning sweep with one-photon
/// Doppler shifts only versus with the residual mismatch kept. Everything
/// else, including the acquisition time, comes from the supplied config.
DopplerGainResult doppler_free_gain(const ExperimentConfig& cfg,
                                    const std::vector<double>& deltas,
                                    const ExecutionPolicy& exec = {});

/// Multiplicative projection of the scenario's gains onto the baseline
/// per-photon phase. An estimate, not a simulation of the scaled design.
ScalingProjection project_single_photon_phase(const ScalingScenario& s);

}  // namespace xpm

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xpm/atomic.hpp"
#include "xpm/cavity.hpp"
#include "xpm/doppler.hpp"
#include "xpm/pulse.hpp"

namespace xpm {

struct IntegratorSpec {
  double dt = 2e-12;    // fixed RK4 step, s
  double t_end = 4e-7;  // s

  bool operator==(const IntegratorSpec&) const = default;
};

/// One full experiment: medium, resonator, pulse pair, detunings, velocity
/// ensemble, and integration window.
struct ExperimentConfig {
  int schema_version = 1;
  std::string label;

  AtomicParams atomic;
  CavityParams cavity;
  MediumParams medium;
  PulseSpec control_pulse{4.5e-15, 30e-9, 0.0, 2e-9};
  PulseSpec probe_pulse{1e-16, 60e-9, 0.0, 2e-9};
  Detunings detunings{-2.0 * constants::pi * 8e8, 0.0};
  DopplerSpec doppler;
  IntegratorSpec integrator;
  double acquisition_time = 1e-7;  // readout time for the reported phase, s
  bool control_phase_enabled = false;
  CavityFieldModel field_model = CavityFieldModel::linearized;

  bool operator==(const ExperimentConfig&) const = default;

  void validate() const;
  std::size_t grid_points() const;  // floor(t_end/dt) + 1
};

/// Raw per-velocity-group trajectory on the shared time grid.
struct GroupSeries {
  std::vector<double> pop1, pop2, ec_mag, ep_mag;
  std::vector<complexd> ep;
};

struct RunSummary {
  double peak_phase = 0.0;                // signed value at max |delta phi|
  double phase_at_acquisition = 0.0;
  double optimal_acquisition_time = 0.0;  // argmax of |homodyne|
  double photons_in_control_pulse = 0.0;
  double phase_per_photon = 0.0;
};

struct RunDiagnostics {
  double pop_min = 0.0;
  double pop_max = 0.0;
  double max_trace_step_increase = 0.0;   // largest one-step growth of the trace
  long coherence_warnings = 0;            // |coh_ij|^2 > pop_i pop_j events
  double probe_photon_peak = 0.0;
  double probe_photon_bound = 0.0;        // empty-cavity buildup bound
  bool photon_bound_ok = true;
  double residual_two_photon_fwhm_hz = 0.0;
  double mc_peak_phase_se = 0.0;          // standard error over MC groups
  std::vector<double> group_velocity;
  std::vector<double> group_peak_phase;   // per-group signed peak phase
};

/// Ensemble-averaged observables. delta_phi is NaN where the reference probe
/// amplitude is below 1e-6 of its peak; homodyne is normalized to unit peak
/// magnitude (all zero when the signal vanishes).
struct RunResult {
  std::vector<double> time;
  std::vector<double> pop1, pop2;
  std::vector<double> ec_mag, ep_mag, ep_out_mag;
  std::vector<double> delta_phi;
  std::vector<double> homodyne;
  RunSummary summary;
  RunDiagnostics diagnostics;
};

struct ExecutionPolicy {
  int threads = 0;  // <= 0 picks hardware concurrency
};

/// The integration left the finite range; t is where it was detected.
struct NumericalError : std::runtime_error {
  explicit NumericalError(double t_blow)
      : std::runtime_error("numerical blow-up at t = " + std::to_string(t_blow) + " s"),
        t(t_blow) {}
  double t;
};

/// Integrates one velocity group from t = 0 (atoms at rest in |0>, fields
/// zero) with fixed-step RK4. control_on false zeroes the control input.
GroupSeries integrate_group(const ExperimentConfig& cfg, const VelocityGroup& group,
                            bool control_on);

/// Phase imprinted on the probe by the control, arg(on) - arg(off) wrapped to
/// (-pi, pi], NaN where |off| < 1e-6 of its own peak.
std::vector<double> xpm_phase(const std::vector<complexd>& on,
                              const std::vector<complexd>& off);

/// Phase-sensitive detection proxy: delta_phi weighted by the transmitted
/// amplitude, normalized to unit peak magnitude. NaN phases count as zero
/// signal (the amplitude weight there is below the mask floor anyway).
std::vector<double> homodyne_signal(const std::vector<double>& delta_phi,
                                    const std::vector<double>& transmitted_mag);

RunResult simulate(const ExperimentConfig& cfg, const ExecutionPolicy& exec = {});

struct SweepPoint {
  double value;
  double phase;  // phase_at_acquisition of that run
};

struct SweepResult {
  std::vector<SweepPoint> curve;
  double best_value = 0.0;  // argmax |phase|, first on ties
  double peak_abs_phase = 0.0;
};

enum class SweepParam { delta, Delta, control_energy };

SweepResult sweep_param(const ExperimentConfig& cfg, SweepParam param,
                        const std::vector<double>& values,
                        const ExecutionPolicy& exec = {});

inline SweepResult sweep_delta(const ExperimentConfig& cfg,
                               const std::vector<double>& deltas,
                               const ExecutionPolicy& exec = {}) {
  return sweep_param(cfg, SweepParam::delta, deltas, exec);
}

}  // namespace xpm

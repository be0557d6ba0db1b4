#include "xpm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace xpm {

void ExperimentConfig::validate() const {
  if (schema_version != 1)
    throw std::invalid_argument("schema_version: unsupported value");
  atomic.validate();
  cavity.validate();
  medium.validate();
  control_pulse.validate("control_pulse");
  probe_pulse.validate("probe_pulse");
  doppler.validate();
  if (!std::isfinite(detunings.Delta))
    throw std::invalid_argument("detunings.Delta_rad_s: must be finite");
  if (!std::isfinite(detunings.delta))
    throw std::invalid_argument("detunings.delta_rad_s: must be finite");
  if (!(integrator.dt > 0))
    throw std::invalid_argument("integrator.dt_s: must be > 0");
  if (!(integrator.t_end > 0))
    throw std::invalid_argument("integrator.t_end_s: must be > 0");
  const double last_pulse =
      std::max(control_pulse.end_time(), probe_pulse.end_time());
  if (!(integrator.t_end > last_pulse))
    throw std::invalid_argument(
        "integrator.t_end_s: must exceed the end of the last pulse");
  if (!(acquisition_time >= 0 && acquisition_time <= integrator.t_end))
    throw std::invalid_argument(
        "acquisition_time_s: must lie within [0, integrator.t_end_s]");
}

std::size_t ExperimentConfig::grid_points() const {
  return static_cast<std::size_t>(std::floor(integrator.t_end / integrator.dt)) + 1;
}

namespace {

// Full integration state of one velocity group: the atom's lower-triangle
// density matrix plus the two intracavity field envelopes.
struct SimState {
  DensityMatrix a;
  complexd Ec{};
  complexd Ep{};
};

inline SimState axpy(const SimState& y, const SimState& k, double h) {
  SimState o;
  o.a.pop0 = y.a.pop0 + h * k.a.pop0;
  o.a.pop1 = y.a.pop1 + h * k.a.pop1;
  o.a.pop2 = y.a.pop2 + h * k.a.pop2;
  o.a.coh10 = y.a.coh10 + h * k.a.coh10;
  o.a.coh21 = y.a.coh21 + h * k.a.coh21;
  o.a.coh20 = y.a.coh20 + h * k.a.coh20;
  o.Ec = y.Ec + h * k.Ec;
  o.Ep = y.Ep + h * k.Ep;
  return o;
}

inline void accumulate(SimState& acc, const SimState& k, double w) {
  acc.a.pop0 += w * k.a.pop0;
  acc.a.pop1 += w * k.a.pop1;
  acc.a.pop2 += w * k.a.pop2;
  acc.a.coh10 += w * k.a.coh10;
  acc.a.coh21 += w * k.a.coh21;
  acc.a.coh20 += w * k.a.coh20;
  acc.Ec += w * k.Ec;
  acc.Ep += w * k.Ep;
}

struct GroupOde {
  AtomicParams atomic;
  CavityParams cav;
  Detunings det;
  double density;
  double omega_c, omega_p, tau;
  double ctrl_peak, probe_peak;
  PulseSpec ctrl, probe;
  bool control_on;
  bool control_phase;
  CavityFieldModel model;

  SimState operator()(double t, const SimState& y) const {
    const DriveAmplitudes d{y.Ec * (atomic.mu10 / constants::hbar),
                            y.Ep * (atomic.mu21 / constants::hbar)};
    SimState out;
    out.a = bloch_rhs(y.a, d, det, atomic);
    const complexd sc =
        atom_source_term(y.a.coh10, atomic.mu10, density, omega_c, tau);
    const complexd sp =
        atom_source_term(y.a.coh21, atomic.mu21, density, omega_p, tau);
    const double ec_in =
        control_on ? pulse_envelope_shape(ctrl, ctrl_peak, t) : 0.0;
    const double ep_in = pulse_envelope_shape(probe, probe_peak, t);
    out.Ec = cavity_rhs(y.Ec, ec_in, sc, cav, control_phase, model);
    out.Ep = cavity_rhs(y.Ep, ep_in, sp, cav, true, model);
    return out;
  }
};

struct LocalDiag {
  double pop_min = 0.0;
  double pop_max = 1.0;
  double max_trace_inc = 0.0;
  long coh_warn = 0;
  double max_ep_mag = 0.0;
};

void integrate_impl(const ExperimentConfig& cfg, const VelocityGroup& group,
                    bool control_on, GroupSeries& out, LocalDiag& diag) {
  GroupOde ode;
  ode.atomic = cfg.atomic;
  ode.cav = cfg.cavity;
  ode.det = shifted_detunings(cfg.detunings, group.velocity, cfg.atomic.lambda_c,
                              cfg.atomic.lambda_p, cfg.doppler.mode);
  ode.density = cfg.medium.density;
  ode.omega_c = 2.0 * constants::pi * constants::c / cfg.atomic.lambda_c;
  ode.omega_p = 2.0 * constants::pi * constants::c / cfg.atomic.lambda_p;
  ode.tau = round_trip_time(cfg.cavity);
  ode.ctrl = cfg.control_pulse;
  ode.probe = cfg.probe_pulse;
  ode.ctrl_peak = cfg.control_pulse.energy > 0
                      ? peak_field_from_pulse(cfg.control_pulse.energy,
                                              cfg.control_pulse.duration,
                                              cfg.cavity.waist)
                      : 0.0;
  ode.probe_peak = cfg.probe_pulse.energy > 0
                       ? peak_field_from_pulse(cfg.probe_pulse.energy,
                                               cfg.probe_pulse.duration,
                                               cfg.cavity.waist)
                       : 0.0;
  ode.control_on = control_on;
  ode.control_phase = cfg.control_phase_enabled;
  ode.model = cfg.field_model;

  const std::size_t npts = cfg.grid_points();
  const double dt = cfg.integrator.dt;

  out.pop1.assign(npts, 0.0);
  out.pop2.assign(npts, 0.0);
  out.ec_mag.assign(npts, 0.0);
  out.ep_mag.assign(npts, 0.0);
  out.ep.assign(npts, complexd{});

  SimState y;
  y.a = ground_state();

  diag = LocalDiag{};
  diag.pop_min = 0.0;
  diag.pop_max = 1.0;

  for (std::size_t k = 1; k < npts; ++k) {
    const double t = (k - 1) * dt;
    const double tr_before = trace(y.a);

    const SimState k1 = ode(t, y);
    const SimState k2 = ode(t + 0.5 * dt, axpy(y, k1, 0.5 * dt));
    const SimState k3 = ode(t + 0.5 * dt, axpy(y, k2, 0.5 * dt));
    const SimState k4 = ode(t + dt, axpy(y, k3, dt));

    SimState ks = k1;
    accumulate(ks, k2, 2.0);
    accumulate(ks, k3, 2.0);
    accumulate(ks, k4, 1.0);
    y = axpy(y, ks, dt / 6.0);

    out.pop1[k] = y.a.pop1;
    out.pop2[k] = y.a.pop2;
    out.ec_mag[k] = std::abs(y.Ec);
    out.ep_mag[k] = std::abs(y.Ep);
    out.ep[k] = y.Ep;

    diag.pop_min = std::min({diag.pop_min, y.a.pop0, y.a.pop1, y.a.pop2});
    diag.pop_max = std::max({diag.pop_max, y.a.pop0, y.a.pop1, y.a.pop2});
    diag.max_trace_inc = std::max(diag.max_trace_inc, trace(y.a) - tr_before);
    diag.max_ep_mag = std::max(diag.max_ep_mag, out.ep_mag[k]);

    if ((k & 63u) == 0) {
      if (std::norm(y.a.coh10) > y.a.pop1 * y.a.pop0 + 1e-10 ||
          std::norm(y.a.coh21) > y.a.pop2 * y.a.pop1 + 1e-10 ||
          std::norm(y.a.coh20) > y.a.pop2 * y.a.pop0 + 1e-10)
        ++diag.coh_warn;
    }
    if ((k & 4095u) == 0 || k + 1 == npts) {
      const double probe_val =
          trace(y.a) + std::norm(y.Ec) + std::norm(y.Ep) + std::norm(y.a.coh20);
      if (!std::isfinite(probe_val)) throw NumericalError(k * dt);
    }
  }
}

inline double wrap_phase(double d) {
  d = std::remainder(d, 2.0 * constants::pi);
  if (d <= -constants::pi) d += 2.0 * constants::pi;
  return d;
}

// Peak-normalize in place; an all-zero signal stays zero.
void normalize_peak(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak > 0.0)
    for (double& x : v) x /= peak;
}

}  // namespace

GroupSeries integrate_group(const ExperimentConfig& cfg, const VelocityGroup& group,
                            bool control_on) {
  GroupSeries out;
  LocalDiag diag;
  integrate_impl(cfg, group, control_on, out, diag);
  return out;
}

std::vector<double> xpm_phase(const std::vector<complexd>& on,
                              const std::vector<complexd>& off) {
  if (on.size() != off.size())
    throw std::invalid_argument("xpm_phase: series grids differ in length");
  double peak = 0.0;
  for (const auto& z : off) peak = std::max(peak, std::abs(z));
  const double floor = 1e-6 * peak;
  std::vector<double> out(on.size());
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (std::abs(off[i]) < floor)
      out[i] = std::numeric_limits<double>::quiet_NaN();
    else
      out[i] = wrap_phase(std::arg(on[i]) - std::arg(off[i]));
  }
  return out;
}

std::vector<double> homodyne_signal(const std::vector<double>& delta_phi,
                                    const std::vector<double>& transmitted_mag) {
  if (delta_phi.size() != transmitted_mag.size())
    throw std::invalid_argument("homodyne_signal: series grids differ in length");
  std::vector<double> out(delta_phi.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::isnan(delta_phi[i]) ? 0.0 : delta_phi[i] * transmitted_mag[i];
  normalize_peak(out);
  return out;
}

RunResult simulate(const ExperimentConfig& cfg, const ExecutionPolicy& exec) {
  cfg.validate();
  const auto groups = sample_velocities(cfg.doppler, cfg.medium.doppler_fwhm,
                                        cfg.atomic.lambda_c);
  const std::size_t npts = cfg.grid_points();
  const double dt = cfg.integrator.dt;
  const double tm = cfg.cavity.t_mirror;

  // Control-off reference. Without the control input nothing couples the
  // atoms out of |0>, the probe sees an empty cavity, and the trajectory is
  // the same for every velocity group; integrate it once and share it.
  GroupSeries off;
  LocalDiag diag_all;
  integrate_impl(cfg, {0.0, 1.0}, false, off, diag_all);

  double off_peak = 0.0;
  for (double m : off.ep_mag) off_peak = std::max(off_peak, m);
  const double mask_floor = 1e-6 * off_peak;
  std::vector<char> masked(npts);
  std::vector<double> off_arg(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    masked[i] = off.ep_mag[i] < mask_floor;
    off_arg[i] = masked[i] ? 0.0 : std::arg(off.ep[i]);
  }

  RunResult res;
  res.time.resize(npts);
  for (std::size_t i = 0; i < npts; ++i) res.time[i] = i * dt;
  res.pop1.assign(npts, 0.0);
  res.pop2.assign(npts, 0.0);
  res.ec_mag.assign(npts, 0.0);
  res.ep_mag.assign(npts, 0.0);
  res.delta_phi.assign(npts, 0.0);
  res.homodyne.assign(npts, 0.0);

  const std::size_t n_groups = groups.size();
  res.diagnostics.group_velocity.resize(n_groups);
  res.diagnostics.group_peak_phase.resize(n_groups);

  int n_threads = exec.threads;
  if (n_threads <= 0)
    n_threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t block = static_cast<std::size_t>(n_threads);

  std::vector<GroupSeries> slot(block);
  std::vector<LocalDiag> slot_diag(block);
  std::vector<std::exception_ptr> slot_err(block);

  for (std::size_t start = 0; start < n_groups; start += block) {
    const std::size_t cnt = std::min(block, n_groups - start);
    std::fill(slot_err.begin(), slot_err.begin() + cnt, nullptr);
    if (cnt == 1) {
      try {
        integrate_impl(cfg, groups[start], true, slot[0], slot_diag[0]);
      } catch (...) {
        slot_err[0] = std::current_exception();
      }
    } else {
      std::vector<std::thread> pool;
      pool.reserve(cnt);
      for (std::size_t j = 0; j < cnt; ++j)
        pool.emplace_back([&, j] {
          try {
            integrate_impl(cfg, groups[start + j], true, slot[j], slot_diag[j]);
          } catch (...) {
            slot_err[j] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
    }
    for (std::size_t j = 0; j < cnt; ++j)
      if (slot_err[j]) std::rethrow_exception(slot_err[j]);

    // Weighted reduction in ascending group order, blocks notwithstanding,
    // so the result does not depend on the thread count.
    for (std::size_t j = 0; j < cnt; ++j) {
      const std::size_t g = start + j;
      const double w = groups[g].weight;
      const GroupSeries& s = slot[j];

      double peak_abs = 0.0;
      double peak_val = 0.0;
      for (std::size_t i = 0; i < npts; ++i) {
        res.pop1[i] += w * s.pop1[i];
        res.pop2[i] += w * s.pop2[i];
        res.ec_mag[i] += w * s.ec_mag[i];
        res.ep_mag[i] += w * s.ep_mag[i];
        if (!masked[i]) {
          const double d = wrap_phase(std::arg(s.ep[i]) - off_arg[i]);
          res.delta_phi[i] += w * d;
          res.homodyne[i] += w * d * (tm * s.ep_mag[i]);
          if (std::abs(d) > peak_abs) {
            peak_abs = std::abs(d);
            peak_val = d;
          }
        }
      }
      res.diagnostics.group_velocity[g] = groups[g].velocity;
      res.diagnostics.group_peak_phase[g] = peak_val;

      diag_all.pop_min = std::min(diag_all.pop_min, slot_diag[j].pop_min);
      diag_all.pop_max = std::max(diag_all.pop_max, slot_diag[j].pop_max);
      diag_all.max_trace_inc =
          std::max(diag_all.max_trace_inc, slot_diag[j].max_trace_inc);
      diag_all.coh_warn += slot_diag[j].coh_warn;
      diag_all.max_ep_mag = std::max(diag_all.max_ep_mag, slot_diag[j].max_ep_mag);
    }
  }

  for (std::size_t i = 0; i < npts; ++i)
    if (masked[i]) res.delta_phi[i] = std::numeric_limits<double>::quiet_NaN();
  normalize_peak(res.homodyne);
  for (std::size_t i = 0; i < npts; ++i) res.ep_out_mag.push_back(tm * res.ep_mag[i]);

  // Summary.
  RunSummary& sm = res.summary;
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < npts; ++i) {
    const double a = std::abs(res.delta_phi[i]);
    if (!std::isnan(a) && a > best) {
      best = a;
      best_i = i;
    }
  }
  sm.peak_phase = best >= 0.0 ? res.delta_phi[best_i] : 0.0;

  std::size_t acq_i = static_cast<std::size_t>(
      std::llround(cfg.acquisition_time / dt));
  acq_i = std::min(acq_i, npts - 1);
  sm.phase_at_acquisition = res.delta_phi[acq_i];

  double hom_best = 0.0;
  std::size_t hom_i = 0;
  for (std::size_t i = 0; i < npts; ++i)
    if (std::abs(res.homodyne[i]) > hom_best) {
      hom_best = std::abs(res.homodyne[i]);
      hom_i = i;
    }
  sm.optimal_acquisition_time = res.time[hom_i];

  sm.photons_in_control_pulse =
      energy_to_photons(cfg.control_pulse.energy, cfg.atomic.lambda_c);
  sm.phase_per_photon = sm.photons_in_control_pulse > 0
                            ? sm.phase_at_acquisition / sm.photons_in_control_pulse
                            : 0.0;

  // Diagnostics.
  RunDiagnostics& dg = res.diagnostics;
  dg.pop_min = diag_all.pop_min;
  dg.pop_max = diag_all.pop_max;
  dg.max_trace_step_increase = diag_all.max_trace_inc;
  dg.coherence_warnings = diag_all.coh_warn;

  const double omega_p = 2.0 * constants::pi * constants::c / cfg.atomic.lambda_p;
  const double vol = mode_volume(cfg.cavity.waist, cfg.cavity.length);
  dg.probe_photon_peak = photon_number(diag_all.max_ep_mag, vol, omega_p);
  const double g = cfg.cavity.r_mirror * cfg.cavity.r_mirror;
  const double buildup = tm * tm / ((1.0 - g) * (1.0 - g));
  double flux = 0.0;
  if (cfg.probe_pulse.energy > 0) {
    const double epk = peak_field_from_pulse(cfg.probe_pulse.energy,
                                             cfg.probe_pulse.duration,
                                             cfg.cavity.waist);
    const double area = constants::pi * cfg.cavity.waist * cfg.cavity.waist / 2.0;
    const double power = 0.5 * constants::eps0 * constants::c * epk * epk * area;
    flux = power / (constants::hbar * omega_p);
  }
  dg.probe_photon_bound = buildup * flux * intensity_lifetime(cfg.cavity);
  dg.photon_bound_ok =
      dg.probe_photon_peak <= dg.probe_photon_bound * (1.0 + 1e-9) + 1e-30;

  dg.residual_two_photon_fwhm_hz =
      cfg.doppler.mode == DopplerMode::residual
          ? residual_two_photon_fwhm_hz(groups, cfg.atomic.lambda_c,
                                        cfg.atomic.lambda_p)
          : 0.0;

  if (cfg.doppler.method == SampleMethod::monte_carlo && n_groups > 1 &&
      cfg.doppler.mode != DopplerMode::off) {
    double mean = 0.0;
    for (double x : dg.group_peak_phase) mean += x;
    mean /= static_cast<double>(n_groups);
    double ss = 0.0;
    for (double x : dg.group_peak_phase) ss += (x - mean) * (x - mean);
    dg.mc_peak_phase_se =
        std::sqrt(ss / (static_cast<double>(n_groups - 1))) /
        std::sqrt(static_cast<double>(n_groups));
  }

  return res;
}

SweepResult sweep_param(const ExperimentConfig& cfg, SweepParam param,
                        const std::vector<double>& values,
                        const ExecutionPolicy& exec) {
  SweepResult out;
  out.curve.reserve(values.size());
  for (double v : values) {
    ExperimentConfig c = cfg;
    switch (param) {
      case SweepParam::delta: c.detunings.delta = v; break;
      case SweepParam::Delta: c.detunings.Delta = v; break;
      case SweepParam::control_energy: c.control_pulse.energy = v; break;
    }
    const RunResult r = simulate(c, exec);
    out.curve.push_back({v, r.summary.phase_at_acquisition});
  }
  for (const auto& p : out.curve) {
    if (std::abs(p.phase) > out.peak_abs_phase) {
      out.peak_abs_phase = std::abs(p.phase);
      out.best_value = p.value;
    }
  }
  if (!out.curve.empty() && out.peak_abs_phase == 0.0)
    out.best_value = out.curve.front().value;
  return out;
}

}  // namespace xpm

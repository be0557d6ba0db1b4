// Acceptance gate for the shipped reference configurations. Each criterion
// prints exactly one PASS/FAIL line with the measured numbers and the pinned
// tolerance; the process exits nonzero if any requested criterion fails.
//
//   xpm_acceptance [--criterion N] [--config-dir DIR]
//
// Without --criterion all seven run in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "xpm/config_io.hpp"
#include "xpm/constants.hpp"
#include "xpm/engine.hpp"
#include "xpm/explorer.hpp"

using namespace xpm;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

bool report(int criterion, bool ok, const std::string& what) {
  std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---- helpers ---------------------------------------------------------------

// 1/e decay time of |Ep|^2 measured from t0 by scanning and interpolating.
double measured_intensity_lifetime(const RunResult& r, double t0) {
  std::size_t i0 = 0;
  while (i0 + 1 < r.time.size() && r.time[i0] < t0) ++i0;
  const double ref = r.ep_mag[i0] * r.ep_mag[i0];
  const double target = ref / std::exp(1.0);
  for (std::size_t i = i0 + 1; i < r.time.size(); ++i) {
    const double v = r.ep_mag[i] * r.ep_mag[i];
    if (v <= target) {
      const double prev = r.ep_mag[i - 1] * r.ep_mag[i - 1];
      const double frac = (prev - target) / (prev - v);
      return r.time[i - 1] + frac * (r.time[i] - r.time[i - 1]) - r.time[i0];
    }
  }
  return -1.0;
}

// Width between the outermost half-maximum crossings of |phase|(x). Covers
// single-peaked and dispersive two-lobed curves alike.
double outer_half_max_width(const SweepResult& sweep) {
  const auto& c = sweep.curve;
  double peak = 0.0;
  for (const auto& p : c) peak = std::max(peak, std::abs(p.phase));
  const double half = 0.5 * peak;
  double lo = 0.0, hi = 0.0;
  bool seen = false;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double a = std::abs(c[i].phase) - half;
    const double b = std::abs(c[i + 1].phase) - half;
    if (a == 0.0 || a * b < 0.0) {
      const double x =
          c[i].value + (0.0 - a) / (b - a) * (c[i + 1].value - c[i].value);
      if (!seen) lo = x, seen = true;
      hi = x;
    }
  }
  return seen ? hi - lo : 0.0;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool runs_identical(const RunResult& a, const RunResult& b) {
  return bits_equal(a.time, b.time) && bits_equal(a.pop1, b.pop1) &&
         bits_equal(a.pop2, b.pop2) && bits_equal(a.ec_mag, b.ec_mag) &&
         bits_equal(a.ep_mag, b.ep_mag) && bits_equal(a.ep_out_mag, b.ep_out_mag) &&
         bits_equal(a.delta_phi, b.delta_phi) && bits_equal(a.homodyne, b.homodyne);
}

// Tiny RK4 on the density matrix for the analytic oracles of criterion 7.
DensityMatrix evolve_atom(DensityMatrix s, const DriveAmplitudes& d,
                          const Detunings& det, const AtomicParams& p, double dt,
                          long steps,
                          double* max_pop1_err = nullptr, double rabi = 0.0) {
  auto ax = [](const DensityMatrix& a, const DensityMatrix& b, double w) {
    DensityMatrix o;
    o.pop0 = a.pop0 + w * b.pop0;
    o.pop1 = a.pop1 + w * b.pop1;
    o.pop2 = a.pop2 + w * b.pop2;
    o.coh10 = a.coh10 + w * b.coh10;
    o.coh21 = a.coh21 + w * b.coh21;
    o.coh20 = a.coh20 + w * b.coh20;
    return o;
  };
  for (long i = 0; i < steps; ++i) {
    const DensityMatrix k1 = bloch_rhs(s, d, det, p);
    const DensityMatrix k2 = bloch_rhs(ax(s, k1, 0.5 * dt), d, det, p);
    const DensityMatrix k3 = bloch_rhs(ax(s, k2, 0.5 * dt), d, det, p);
    const DensityMatrix k4 = bloch_rhs(ax(s, k3, dt), d, det, p);
    s = ax(s, ax(ax(k1, k2, 2.0), ax(k4, k3, 2.0), 1.0), dt / 6.0);
    if (max_pop1_err) {
      const double t = (i + 1) * dt;
      const double want = std::sin(rabi * t) * std::sin(rabi * t);
      *max_pop1_err = std::max(*max_pop1_err, std::abs(s.pop1 - want));
    }
  }
  return s;
}

// ---- criteria --------------------------------------------------------------

bool criterion_1(const std::string&) {
  const double t0 = now_seconds();
  ExperimentConfig cfg = default_config();
  cfg.label = "empty_cavity";
  cfg.medium.density = 0.0;
  cfg.doppler.mode = DopplerMode::off;
  const RunResult r = simulate(cfg);
  const double tl = measured_intensity_lifetime(r, 7e-8);
  const double dt = now_seconds() - t0;
  const bool ok = tl > 72e-9 && tl < 88e-9 && dt < 1.0;
  return report(1, ok,
                fmt("empty-cavity lifetime: 1/e intensity decay %.2f ns, "
                    "expected 80 ns +-10%% [72, 88]; runtime %.2f s (limit 1 s)",
                    tl * 1e9, dt));
}

bool criterion_2(const std::string&) {
  CavityParams cav;  // 25 mm, r 0.9995, t 0.0316
  const double f = finesse(cav);
  const double w0 = confocal_waist(cav.length, 823e-9);
  const double q = quality_factor(cav, 853e-9);
  const double n = energy_to_photons(4.5e-15, 823e-9);

  const bool f_ok = std::abs(f / 3000.0 - 1.0) < 0.10;
  const bool w_ok = std::abs(w0 / 60e-6 - 1.0) < 0.10;
  const bool q_ok = q / 3e8 > 0.5 && q / 3e8 < 2.0;
  const bool n_ok = std::abs(n / 18000.0 - 1.0) < 0.05;
  return report(2, f_ok && w_ok && q_ok && n_ok,
                fmt("derived figures: finesse %.1f (3000 +-10%%), waist %.2f um "
                    "(60 +-10%%), Q %.3e (3e8 within x2), photons %.1f "
                    "(18000 +-5%%)",
                    f, w0 * 1e6, q, n));
}

// Reference value frozen after the one-time density calibration of the
// shipped 25 mm configuration; the +-5% band is the regression guard.
constexpr double reference_phase = 4.999178330076736e-3;

bool criterion_3(const std::string& config_dir) {
  const double t0 = now_seconds();
  const ExperimentConfig cfg = load_config(config_dir + "/paper_fig5.json");
  const RunResult r = simulate(cfg);
  const double phase = r.summary.phase_at_acquisition;
  const double per_photon = std::abs(r.summary.phase_per_photon);
  const double dt = now_seconds() - t0;

  const bool window_ok = std::abs(phase) > 4e-3 && std::abs(phase) < 6e-3;
  const bool regression_ok =
      std::abs(phase - reference_phase) <= 0.05 * std::abs(reference_phase);
  const bool photon_ok = per_photon > 0.15e-6 && per_photon < 0.6e-6;
  return report(3, window_ok && regression_ok && photon_ok,
                fmt("headline phase: %.4f mrad (window 5 +-1 mrad, regression "
                    "%.4f mrad +-5%%), %.3f urad/photon (0.3 within x2); "
                    "runtime %.1f s (target < 300 s)",
                    phase * 1e3, reference_phase * 1e3, per_photon * 1e6, dt));
}

bool criterion_4(const std::string& config_dir) {
  const ExperimentConfig cfg = load_config(config_dir + "/paper_fig5.json");
  const RunResult r = simulate(cfg);
  const double t_opt = r.summary.optimal_acquisition_time;
  const double arrival = cfg.control_pulse.delay;
  const double after = t_opt - arrival;
  const bool ok = after > 70e-9 && after < 130e-9;
  return report(4, ok,
                fmt("homodyne timing: peak signal %.2f ns after pulse arrival, "
                    "expected 100 +-30 ns [70, 130]",
                    after * 1e9));
}

bool criterion_5(const std::string& config_dir) {
  const double t0 = now_seconds();
  const ExperimentConfig cfg = load_config(config_dir + "/paper_fig6.json");

  const RunResult probe = simulate(cfg);
  const double fwhm = probe.diagnostics.residual_two_photon_fwhm_hz;

  std::vector<double> deltas;
  for (int i = 0; i < 41; ++i) deltas.push_back(-2e8 + 1e7 * i);
  const DopplerGainResult g = doppler_free_gain(cfg, deltas);
  const double w_free = outer_half_max_width(g.free_curve);
  const double w_res = outer_half_max_width(g.residual_curve);
  const double dt = now_seconds() - t0;

  const bool gain_ok = g.gain > 1.5 && g.gain < 4.5;
  const bool fwhm_ok = fwhm > 12.8e6 && fwhm < 19.2e6;
  const bool width_ok = w_free > 0.0 && w_res > 0.0 && w_free < w_res;
  return report(5, gain_ok && fwhm_ok && width_ok,
                fmt("doppler-mode comparison: free/residual peak ratio %.3f "
                    "(window [1.5, 4.5]), residual ensemble width %.2f MHz "
                    "(16 +-20%%), curve widths %.2e vs %.2e rad/s (free must "
                    "be narrower); runtime %.0f s (limit 1800 s)",
                    g.gain, fwhm * 1e-6, w_free, w_res, dt));
}

bool criterion_6(const std::string&) {
  const double a = qv_enhancement(0.025, 0.0025, true);
  const double b = qv_enhancement(0.025, 0.00025, true);
  const double c = dipole_gain(2.4e-29, 1.2e-30);
  const double d = dipole_gain(7.6e-30, 7.6e-30);

  const bool a_ok = std::abs(a - std::pow(10.0, 1.5)) < 1e-12 * a;
  const bool b_ok = std::abs(b - 1000.0) < 1e-12 * b;
  const bool c_ok = std::abs(c - 400.0) < 1e-12 * c;
  const bool d_ok = d == 1.0;
  return report(6, a_ok && b_ok && c_ok && d_ok,
                fmt("scaling calculus: qv(25mm,2.5mm) %.6f (= 31.622777), "
                    "qv(25mm,0.25mm) %.6f (= 1000), dipole ratios %.1f (= 400) "
                    "and %.1f (= 1)",
                    a, b, c, d));
}

bool criterion_7(const std::string& config_dir) {
  const double t0 = now_seconds();

  // Undamped resonant Rabi oscillation against sin^2(R t).
  AtomicParams undamped;
  undamped.gamma1 = undamped.gamma2 = undamped.Gamma10 = undamped.Gamma21 = 0.0;
  const double rabi = 1e7;
  double rabi_err = 0.0;
  evolve_atom(ground_state(), DriveAmplitudes{complexd{rabi, 0.0}, {}},
              Detunings{}, undamped, 1e-10, 10000, &rabi_err, rabi);
  const bool rabi_ok = rabi_err < 1e-6;

  // Weak-drive steady coherence against the analytic Lorentzian.
  AtomicParams p;
  const complexd weak{1e3, 0.0};
  const double Delta = -5e7;
  const DensityMatrix steady = evolve_atom(
      ground_state(), DriveAmplitudes{weak, {}}, Detunings{Delta, 0.0}, p, 2e-10,
      10000);
  const complexd lorentzian =
      linear_steady_coherence(weak, Delta, dephasing_rates(p).gamma10);
  const double steady_err =
      std::abs(steady.coh10 - lorentzian) / std::abs(lorentzian);
  const bool steady_ok = steady_err < 1e-6;

  // RK4 halving-step self-convergence on the regression configuration,
  // plus population/trace sanity from the same runs.
  const ExperimentConfig cfg = load_config(config_dir + "/paper_fig5.json");
  const RunResult coarse = simulate(cfg);
  ExperimentConfig half = cfg;
  half.integrator.dt = 0.5 * cfg.integrator.dt;
  const RunResult fine = simulate(half);
  const double conv_err =
      std::abs(coarse.summary.peak_phase - fine.summary.peak_phase) /
      std::abs(fine.summary.peak_phase);
  const bool conv_ok = conv_err < 1e-3;
  const bool pops_ok = coarse.diagnostics.pop_min > -1e-9 &&
                       coarse.diagnostics.pop_max < 1.0 + 1e-9 &&
                       coarse.diagnostics.max_trace_step_increase < 1e-12;

  // Bit-identical reruns, single-threaded and parallel.
  ExperimentConfig small = cfg;
  small.doppler.n_groups = 16;
  small.integrator.t_end = 1e-7;
  small.acquisition_time = 9e-8;
  const RunResult s1 = simulate(small, ExecutionPolicy{1});
  const RunResult s2 = simulate(small, ExecutionPolicy{1});
  const RunResult s4 = simulate(small, ExecutionPolicy{4});
  const bool det_ok = runs_identical(s1, s2) && runs_identical(s1, s4);

  // Control-energy linearity of the phase in the perturbative regime.
  ExperimentConfig lin = cfg;
  lin.doppler.method = SampleMethod::quadrature;
  lin.doppler.n_groups = 24;
  double lin_worst = 0.0;
  const RunResult base = simulate(lin);
  for (double s : {0.5, 2.0}) {
    ExperimentConfig scaled = lin;
    scaled.control_pulse.energy = s * lin.control_pulse.energy;
    const RunResult r = simulate(scaled);
    lin_worst = std::max(lin_worst,
                         std::abs(r.summary.phase_at_acquisition /
                                      (s * base.summary.phase_at_acquisition) -
                                  1.0));
  }
  const bool lin_ok = lin_worst < 0.10;

  // Monte Carlo against Gauss-Hermite ensemble agreement.
  ExperimentConfig mc = cfg;
  mc.doppler.n_groups = 512;
  const RunResult rmc = simulate(mc);
  ExperimentConfig gh = cfg;
  gh.doppler.method = SampleMethod::quadrature;
  gh.doppler.n_groups = 32;
  const RunResult rgh = simulate(gh);
  const double se = rmc.diagnostics.mc_peak_phase_se;
  const double mc_dev = std::abs(rmc.summary.peak_phase - rgh.summary.peak_phase);
  const bool mc_ok = se > 0.0 && mc_dev <= 3.0 * se;

  const double dt = now_seconds() - t0;
  const bool ok =
      rabi_ok && steady_ok && conv_ok && pops_ok && det_ok && lin_ok && mc_ok;
  return report(
      7, ok,
      fmt("property suite: rabi err %.1e (<1e-6), steady err %.1e (<1e-6), "
          "halving err %.1e (<1e-3), pops [%.1e, 1+%.1e] trace step +%.1e, "
          "bitwise reruns %s, linearity err %.1f%% (<10%%), mc-gh gap %.2f se "
          "(<3); runtime %.0f s (limit 120 s)",
          rabi_err, steady_err, conv_err, coarse.diagnostics.pop_min,
          coarse.diagnostics.pop_max - 1.0,
          coarse.diagnostics.max_trace_step_increase, det_ok ? "ok" : "DIFFER",
          lin_worst * 100.0, se > 0.0 ? mc_dev / se : -1.0, dt));
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string config_dir = "configs";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (arg == "--config-dir" && i + 1 < argc)
      config_dir = argv[++i];
    else {
      std::fprintf(stderr,
                   "usage: %s [--criterion N] [--config-dir DIR]\n", argv[0]);
      return 2;
    }
  }

  bool (*criteria[])(const std::string&) = {criterion_1, criterion_2,
                                            criterion_3, criterion_4,
                                            criterion_5, criterion_6,
                                            criterion_7};
  bool all_ok = true;
  try {
    for (int n = 1; n <= 7; ++n) {
      if (only != 0 && n != only) continue;
      all_ok = criteria[n - 1](config_dir) && all_ok;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return all_ok ? 0 : 1;
}

// Python bindings for the core operations: parameter types, the optical
// Bloch pieces, cavity figures of merit, Doppler sampling, the simulation
// engine, and the design projections.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xpm/config_io.hpp"
#include "xpm/version.hpp"

namespace py = pybind11;
using namespace xpm;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(_xpm_core, m) {
  m.doc() = "Cross-phase modulation in a driven three-level medium inside a "
            "high-finesse cavity";
  m.attr("__version__") = tool_version;
  m.attr("SPEED_OF_LIGHT") = constants::c;
  m.attr("HBAR") = constants::hbar;
  m.attr("PLANCK") = constants::h;
  m.attr("EPS0") = constants::eps0;

  py::class_<AtomicParams>(m, "AtomicParams")
      .def(py::init<>())
      .def_readwrite("gamma1", &AtomicParams::gamma1)
      .def_readwrite("gamma2", &AtomicParams::gamma2)
      .def_readwrite("gamma0", &AtomicParams::gamma0)
      .def_readwrite("Gamma10", &AtomicParams::Gamma10)
      .def_readwrite("Gamma21", &AtomicParams::Gamma21)
      .def_readwrite("mu10", &AtomicParams::mu10)
      .def_readwrite("mu21", &AtomicParams::mu21)
      .def_readwrite("lambda_c", &AtomicParams::lambda_c)
      .def_readwrite("lambda_p", &AtomicParams::lambda_p);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<>())
      .def_readwrite("pop0", &DensityMatrix::pop0)
      .def_readwrite("pop1", &DensityMatrix::pop1)
      .def_readwrite("pop2", &DensityMatrix::pop2)
      .def_readwrite("coh10", &DensityMatrix::coh10)
      .def_readwrite("coh21", &DensityMatrix::coh21)
      .def_readwrite("coh20", &DensityMatrix::coh20);

  py::class_<Detunings>(m, "Detunings")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("Delta"), py::arg("delta"))
      .def_readwrite("Delta", &Detunings::Delta)
      .def_readwrite("delta", &Detunings::delta);

  py::class_<DriveAmplitudes>(m, "DriveAmplitudes")
      .def(py::init<>())
      .def(py::init<complexd, complexd>(), py::arg("R10"), py::arg("R21"))
      .def_readwrite("R10", &DriveAmplitudes::R10)
      .def_readwrite("R21", &DriveAmplitudes::R21);

  py::class_<DephasingRates>(m, "DephasingRates")
      .def_readonly("gamma10", &DephasingRates::gamma10)
      .def_readonly("gamma21", &DephasingRates::gamma21)
      .def_readonly("gamma20", &DephasingRates::gamma20);

  m.def("dephasing_rates", &dephasing_rates);
  m.def("ground_state", &ground_state);
  m.def("trace", &trace);
  m.def("bloch_rhs", &bloch_rhs, py::arg("state"), py::arg("drives"),
        py::arg("detunings"), py::arg("params"));
  m.def("linear_steady_coherence", &linear_steady_coherence, py::arg("R10"),
        py::arg("Delta"), py::arg("gamma10"));

  py::class_<CavityParams>(m, "CavityParams")
      .def(py::init<>())
      .def_readwrite("length", &CavityParams::length)
      .def_readwrite("r_mirror", &CavityParams::r_mirror)
      .def_readwrite("t_mirror", &CavityParams::t_mirror)
      .def_readwrite("waist", &CavityParams::waist);

  py::class_<MediumParams>(m, "MediumParams")
      .def(py::init<>())
      .def_readwrite("density", &MediumParams::density)
      .def_readwrite("doppler_fwhm", &MediumParams::doppler_fwhm);

  m.def("round_trip_time", &round_trip_time);
  m.def("finesse", &finesse);
  m.def("intensity_lifetime", &intensity_lifetime);
  m.def("quality_factor", &quality_factor, py::arg("cavity"), py::arg("lambda_"));
  m.def("confocal_waist", &confocal_waist, py::arg("length"), py::arg("lambda_"));
  m.def("mode_volume", &mode_volume, py::arg("waist"), py::arg("length"));
  m.def("energy_to_photons", &energy_to_photons, py::arg("energy"),
        py::arg("lambda_"));
  m.def("photon_number", &photon_number, py::arg("field"), py::arg("volume"),
        py::arg("omega"));
  m.def("peak_field_from_pulse", &peak_field_from_pulse, py::arg("energy"),
        py::arg("duration"), py::arg("waist"));
  m.def("atom_source_term", &atom_source_term, py::arg("coherence"),
        py::arg("mu"), py::arg("density"), py::arg("omega"), py::arg("tau"));

  py::class_<PulseSpec>(m, "PulseSpec")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("energy"),
           py::arg("duration"), py::arg("delay") = 0.0,
           py::arg("edge_time") = 0.0)
      .def_readwrite("energy", &PulseSpec::energy)
      .def_readwrite("duration", &PulseSpec::duration)
      .def_readwrite("delay", &PulseSpec::delay)
      .def_readwrite("edge_time", &PulseSpec::edge_time);

  m.def("pulse_envelope", &pulse_envelope, py::arg("pulse"), py::arg("waist"),
        py::arg("t"));

  py::enum_<DopplerMode>(m, "DopplerMode")
      .value("off", DopplerMode::off)
      .value("free", DopplerMode::free_running)
      .value("residual", DopplerMode::residual);

  py::enum_<SampleMethod>(m, "SampleMethod")
      .value("monte_carlo", SampleMethod::monte_carlo)
      .value("quadrature", SampleMethod::quadrature);

  py::class_<DopplerSpec>(m, "DopplerSpec")
      .def(py::init<>())
      .def_readwrite("mode", &DopplerSpec::mode)
      .def_readwrite("n_groups", &DopplerSpec::n_groups)
      .def_readwrite("method", &DopplerSpec::method)
      .def_readwrite("seed", &DopplerSpec::seed);

  py::class_<VelocityGroup>(m, "VelocityGroup")
      .def(py::init<double, double>(), py::arg("velocity"), py::arg("weight"))
      .def_readwrite("velocity", &VelocityGroup::velocity)
      .def_readwrite("weight", &VelocityGroup::weight);

  m.def("velocity_sigma", &velocity_sigma, py::arg("fwhm_hz"), py::arg("lambda_"));
  m.def("sample_velocities", &sample_velocities, py::arg("spec"),
        py::arg("fwhm_hz"), py::arg("lambda_c"));
  m.def("shifted_detunings", &shifted_detunings, py::arg("detunings"),
        py::arg("velocity"), py::arg("lambda_c"), py::arg("lambda_p"),
        py::arg("mode"));
  m.def("ensemble_average", &ensemble_average, py::arg("series"),
        py::arg("weights"));

  py::enum_<CavityFieldModel>(m, "CavityFieldModel")
      .value("linearized", CavityFieldModel::linearized)
      .value("exact", CavityFieldModel::exact);

  py::class_<IntegratorSpec>(m, "IntegratorSpec")
      .def(py::init<>())
      .def_readwrite("dt", &IntegratorSpec::dt)
      .def_readwrite("t_end", &IntegratorSpec::t_end);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init(&default_config))
      .def_readwrite("label", &ExperimentConfig::label)
      .def_readwrite("atomic", &ExperimentConfig::atomic)
      .def_readwrite("cavity", &ExperimentConfig::cavity)
      .def_readwrite("medium", &ExperimentConfig::medium)
      .def_readwrite("control_pulse", &ExperimentConfig::control_pulse)
      .def_readwrite("probe_pulse", &ExperimentConfig::probe_pulse)
      .def_readwrite("detunings", &ExperimentConfig::detunings)
      .def_readwrite("doppler", &ExperimentConfig::doppler)
      .def_readwrite("integrator", &ExperimentConfig::integrator)
      .def_readwrite("acquisition_time", &ExperimentConfig::acquisition_time)
      .def_readwrite("control_phase_enabled",
                     &ExperimentConfig::control_phase_enabled)
      .def_readwrite("field_model", &ExperimentConfig::field_model)
      .def("validate", &ExperimentConfig::validate)
      .def("grid_points", &ExperimentConfig::grid_points);

  m.def("default_config", &default_config);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("json_text"));
  m.def("config_to_json", &config_to_json_text, py::arg("config"),
        py::arg("indent") = 2);
  m.def("config_hash", &config_hash);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("peak_phase", &RunSummary::peak_phase)
      .def_readonly("phase_at_acquisition", &RunSummary::phase_at_acquisition)
      .def_readonly("optimal_acquisition_time",
                    &RunSummary::optimal_acquisition_time)
      .def_readonly("photons_in_control_pulse",
                    &RunSummary::photons_in_control_pulse)
      .def_readonly("phase_per_photon", &RunSummary::phase_per_photon);

  py::class_<RunDiagnostics>(m, "RunDiagnostics")
      .def_readonly("pop_min", &RunDiagnostics::pop_min)
      .def_readonly("pop_max", &RunDiagnostics::pop_max)
      .def_readonly("max_trace_step_increase",
                    &RunDiagnostics::max_trace_step_increase)
      .def_readonly("coherence_warnings", &RunDiagnostics::coherence_warnings)
      .def_readonly("probe_photon_peak", &RunDiagnostics::probe_photon_peak)
      .def_readonly("probe_photon_bound", &RunDiagnostics::probe_photon_bound)
      .def_readonly("photon_bound_ok", &RunDiagnostics::photon_bound_ok)
      .def_readonly("residual_two_photon_fwhm_hz",
                    &RunDiagnostics::residual_two_photon_fwhm_hz)
      .def_readonly("mc_peak_phase_se", &RunDiagnostics::mc_peak_phase_se);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("time", [](const RunResult& r) { return as_array(r.time); })
      .def_property_readonly("pop1", [](const RunResult& r) { return as_array(r.pop1); })
      .def_property_readonly("pop2", [](const RunResult& r) { return as_array(r.pop2); })
      .def_property_readonly("ec_mag", [](const RunResult& r) { return as_array(r.ec_mag); })
      .def_property_readonly("ep_mag", [](const RunResult& r) { return as_array(r.ep_mag); })
      .def_property_readonly("ep_out_mag",
                             [](const RunResult& r) { return as_array(r.ep_out_mag); })
      .def_property_readonly("delta_phi",
                             [](const RunResult& r) { return as_array(r.delta_phi); })
      .def_property_readonly("homodyne",
                             [](const RunResult& r) { return as_array(r.homodyne); })
      .def_readonly("summary", &RunResult::summary)
      .def_readonly("diagnostics", &RunResult::diagnostics);

  m.def(
      "simulate",
      [](const ExperimentConfig& cfg, int threads) {
        py::gil_scoped_release release;
        return simulate(cfg, {threads});
      },
      py::arg("config"), py::arg("threads") = 0);

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("phase", &SweepPoint::phase);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("curve", &SweepResult::curve)
      .def_readonly("best_value", &SweepResult::best_value)
      .def_readonly("peak_abs_phase", &SweepResult::peak_abs_phase);

  m.def(
      "sweep_delta",
      [](const ExperimentConfig& cfg, const std::vector<double>& deltas,
         int threads) {
        py::gil_scoped_release release;
        return sweep_delta(cfg, deltas, {threads});
      },
      py::arg("config"), py::arg("deltas"), py::arg("threads") = 0);

  py::class_<ScalingScenario>(m, "ScalingScenario")
      .def(py::init<>())
      .def_readwrite("label", &ScalingScenario::label)
      .def_readwrite("baseline_length", &ScalingScenario::baseline_length)
      .def_readwrite("new_length", &ScalingScenario::new_length)
      .def_readwrite("fixed_quality", &ScalingScenario::fixed_quality)
      .def_readwrite("dipole_old", &ScalingScenario::dipole_old)
      .def_readwrite("dipole_new", &ScalingScenario::dipole_new)
      .def_readwrite("doppler_gain", &ScalingScenario::doppler_gain)
      .def_readwrite("baseline_phase_per_photon",
                     &ScalingScenario::baseline_phase_per_photon);

  py::class_<ScalingProjection>(m, "ScalingProjection")
      .def_readonly("qv_enhancement", &ScalingProjection::qv_enhancement)
      .def_readonly("dipole_gain", &ScalingProjection::dipole_gain)
      .def_readonly("doppler_gain", &ScalingProjection::doppler_gain)
      .def_readonly("projected_phase", &ScalingProjection::projected_phase);

  py::class_<DopplerGainResult>(m, "DopplerGainResult")
      .def_readonly("gain", &DopplerGainResult::gain)
      .def_readonly("free_curve", &DopplerGainResult::free_curve)
      .def_readonly("residual_curve", &DopplerGainResult::residual_curve);

  m.def(
      "doppler_free_gain",
      [](const ExperimentConfig& cfg, const std::vector<double>& deltas,
         int threads) {
        py::gil_scoped_release release;
        return doppler_free_gain(cfg, deltas, {threads});
      },
      py::arg("config"), py::arg("deltas"), py::arg("threads") = 0);

  m.def("qv_enhancement", &qv_enhancement, py::arg("baseline_length"),
        py::arg("new_length"), py::arg("fixed_quality") = true);
  m.def("dipole_gain", &dipole_gain, py::arg("mu_new"), py::arg("mu_old"));
  m.def("project_single_photon_phase", &project_single_photon_phase);
  m.def("xpm_phase", &xpm_phase, py::arg("on"), py::arg("off"));
  m.def("homodyne_signal", &homodyne_signal, py::arg("delta_phi"),
        py::arg("transmitted_mag"));
}

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "xpm/atomic.hpp"
#include "xpm/constants.hpp"

namespace xpm {

/// Below this intracavity amplitude (V/m) the field direction is undefined
/// and phase-sensitive operations fall back to their trivial limits.
inline constexpr double field_floor = 1e-12;

/// Symmetric two-mirror resonator. r_mirror is the amplitude reflectance of
/// one mirror, t_mirror the amplitude transmission, independent inputs so a
/// lossy coating can be represented (r^2 + t^2 <= 1).
struct CavityParams {
  double length = 0.025;    // mirror spacing, m
  double r_mirror = 0.9995;
  double t_mirror = 0.0316;
  double waist = 0.0;       // mode waist, m; 0 means derive the confocal value

  bool operator==(const CavityParams&) const = default;

  void validate() const {
    if (!(length > 0)) throw std::invalid_argument("cavity.length_m: must be > 0");
    if (!(r_mirror > 0 && r_mirror < 1))
      throw std::invalid_argument("cavity.r_mirror: must be in (0, 1)");
    if (!(t_mirror > 0 && t_mirror < 1))
      throw std::invalid_argument("cavity.t_mirror: must be in (0, 1)");
    if (!(waist > 0)) throw std::invalid_argument("cavity.waist_m: must be > 0");
  }

  /// Energy bookkeeping check; a large residue usually means swapped inputs.
  std::optional<std::string> consistency_warning() const {
    const double res = std::abs(r_mirror * r_mirror + t_mirror * t_mirror - 1.0);
    if (res >= 1e-3)
      return "cavity: |r^2 + t^2 - 1| = " + std::to_string(res) +
             ", mirror amplitudes are far from energy-conserving";
    return std::nullopt;
  }
};

/// The intracavity vapor.
struct MediumParams {
  double density = 0.0;          // number density of ladder atoms, 1/m^3
  double doppler_fwhm = 4.4e8;   // one-photon Doppler width (ordinary Hz) at lambda_c

  bool operator==(const MediumParams&) const = default;

  void validate() const {
    if (!(density >= 0)) throw std::invalid_argument("medium.density_per_m3: must be >= 0");
    if (!(doppler_fwhm >= 0))
      throw std::invalid_argument("medium.doppler_fwhm_hz: must be >= 0");
  }
};

inline double round_trip_time(const CavityParams& cav) {
  return 2.0 * cav.length / constants::c;
}

inline double finesse(const CavityParams& cav) {
  const double g = cav.r_mirror * cav.r_mirror;
  if (!(g < 1.0)) throw std::domain_error("finesse: round-trip gain must be < 1");
  return constants::pi * std::sqrt(g) / (1.0 - g);
}

/// 1/e time of the intracavity intensity of the empty resonator.
inline double intensity_lifetime(const CavityParams& cav) {
  const double g = cav.r_mirror * cav.r_mirror;
  return round_trip_time(cav) / (2.0 * (1.0 - g));
}

inline double quality_factor(const CavityParams& cav, double lambda) {
  const double omega = 2.0 * constants::pi * constants::c / lambda;
  return omega * intensity_lifetime(cav);
}

/// Waist of the confocal TEM00 mode, w0 = sqrt(L lambda / 2 pi).
inline double confocal_waist(double length, double lambda) {
  return std::sqrt(length * lambda / (2.0 * constants::pi));
}

/// Effective mode volume pi w0^2 L / 4 of the standing-wave Gaussian mode.
inline double mode_volume(double waist, double length) {
  return constants::pi * waist * waist * length / 4.0;
}

inline double energy_to_photons(double energy, double lambda) {
  return energy * lambda / (constants::h * constants::c);
}

/// Photons stored in a mode of volume V at peak amplitude E.
inline double photon_number(double field, double volume, double omega) {
  return constants::eps0 * field * field * volume / (2.0 * constants::hbar * omega);
}

/// Peak field of a flat pulse of given energy focused to waist w0,
/// P = eps0 c |E|^2 (pi w0^2 / 2) / 2.
inline double peak_field_from_pulse(double energy, double duration, double waist) {
  const double power = energy / duration;
  return std::sqrt(4.0 * power /
                   (constants::eps0 * constants::c * constants::pi * waist * waist));
}

/// Per-round-trip source exponent times the field, x E with
/// x = (-beta + i phi) tau = i omega tau N mu sigma / (2 eps0).
/// Working with the product avoids dividing by E where the field vanishes.
inline complexd atom_source_term(complexd coherence, double mu, double density,
                                 double omega, double tau) {
  return complexd{0.0, 1.0} *
         (omega * tau * density * mu / (2.0 * constants::eps0)) * coherence;
}

struct LossPhase {
  double beta;  // amplitude loss rate contribution, 1/s
  double phi;   // phase rotation rate contribution, rad/s
};

/// Splits the source into per-second loss and phase parts; empty when the
/// field is too small to define a direction.
inline std::optional<LossPhase> loss_phase_diagnostic(complexd source, complexd field,
                                                      double tau) {
  if (std::abs(field) <= field_floor) return std::nullopt;
  const complexd x = source / field;
  return LossPhase{-std::real(x) / tau, std::imag(x) / tau};
}

/// Component of the source parallel to the field. Used to drop the phase a
/// drive imprints on its own mode while keeping its loss.
inline complexd project_parallel(complexd source, complexd field) {
  const double n2 = std::norm(field);
  if (n2 <= field_floor * field_floor) return complexd{};
  return field * (std::real(source * std::conj(field)) / n2);
}

enum class CavityFieldModel { linearized, exact };

/// Round-trip field derivative,
///   dE/dt = ( t E_in + (r^2 exp(x) - 1) E ) / tau
/// with x E = source. The default expands r^2 exp(x) - 1 to first order in x,
/// valid while |x| << 1; the exact mode keeps the exponential and exists to
/// validate that expansion. With phase_enabled false only the real (loss)
/// part of the source acts on the field.
inline complexd cavity_rhs(complexd field, double field_in, complexd source,
                           const CavityParams& cav, bool phase_enabled,
                           CavityFieldModel model = CavityFieldModel::linearized) {
  const double tau = round_trip_time(cav);
  const double g = cav.r_mirror * cav.r_mirror;
  const double drive = cav.t_mirror * field_in;

  if (model == CavityFieldModel::exact && std::abs(field) > field_floor) {
    complexd x = source / field;
    if (!phase_enabled) x = complexd{x.real(), 0.0};
    return (drive + (g * std::exp(x) - 1.0) * field) / tau;
  }
  const complexd s_eff = phase_enabled ? source : project_parallel(source, field);
  return (drive + (g - 1.0) * field + g * s_eff) / tau;
}

}  // namespace xpm

#pragma once

#include <cstdint>
#include <vector>

#include "xpm/atomic.hpp"

namespace xpm {

/// Velocity handling of the thermal ensemble.
///  off       single group at rest
///  free      counter-propagating beams, one-photon shifts only
///  residual  counter-propagating beams with the two-photon mismatch kept
enum class DopplerMode { off, free_running, residual };

enum class SampleMethod { monte_carlo, quadrature };

struct DopplerSpec {
  DopplerMode mode = DopplerMode::residual;
  int n_groups = 256;
  SampleMethod method = SampleMethod::monte_carlo;
  std::uint64_t seed = 12345;

  bool operator==(const DopplerSpec&) const = default;

  void validate() const;
};

struct VelocityGroup {
  double velocity;  // axial velocity, m/s
  double weight;    // ensemble weight, weights over a sample sum to 1
};

/// RMS axial velocity implied by a one-photon Doppler FWHM (ordinary Hz)
/// at wavelength lambda.
double velocity_sigma(double fwhm_hz, double lambda);

/// Draws (monte_carlo) or places (quadrature, Gauss-Hermite) velocity groups
/// for the thermal distribution. Mode off yields a single group at rest.
/// Monte carlo sampling uses mt19937_64 with Box-Muller so a seed pins the
/// ensemble exactly.
std::vector<VelocityGroup> sample_velocities(const DopplerSpec& spec, double fwhm_hz,
                                             double lambda_c);

/// Detunings seen by an atom moving with axial velocity v against the control
/// and with the probe. In free_running mode only the one-photon detuning
/// shifts; in residual mode the two-photon detuning picks up the wave-number
/// mismatch of the counter-propagating pair.
Detunings shifted_detunings(const Detunings& det, double v, double lambda_c,
                            double lambda_p, DopplerMode mode);

/// Pointwise weighted mean of per-group series. All series must share one
/// grid; the reduction runs in ascending group order so results are
/// bit-reproducible.
std::vector<double> ensemble_average(const std::vector<std::vector<double>>& series,
                                     const std::vector<double>& weights);

/// Gauss-Hermite nodes and weights for weight function exp(-x^2); weights
/// sum to sqrt(pi).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_hermite(int n);

/// FWHM (ordinary Hz) of the two-photon detuning spread of a sampled
/// ensemble under residual-mode shifts.
double residual_two_photon_fwhm_hz(const std::vector<VelocityGroup>& groups,
                                   double lambda_c, double lambda_p);

}  // namespace xpm

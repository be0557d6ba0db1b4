#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "xpm/cavity.hpp"
#include "xpm/constants.hpp"

namespace xpm {

/// Quasi-rectangular drive pulse: flat top at the peak field implied by
/// energy/duration, raised-cosine turn-on and turn-off of width edge_time
/// inside [delay, delay + duration], zero outside.
struct PulseSpec {
  double energy = 0.0;     // J
  double duration = 0.0;   // s
  double delay = 0.0;      // s, arrival relative to t = 0
  double edge_time = 0.0;  // s

  bool operator==(const PulseSpec&) const = default;

  void validate(const char* name) const {
    using std::string;
    if (!(energy >= 0)) throw std::invalid_argument(string(name) + ".energy_j: must be >= 0");
    if (!(duration > 0)) throw std::invalid_argument(string(name) + ".duration_s: must be > 0");
    if (!(delay >= 0)) throw std::invalid_argument(string(name) + ".delay_s: must be >= 0");
    if (!(edge_time >= 0 && edge_time <= 0.5 * duration))
      throw std::invalid_argument(string(name) +
                                  ".edge_time_s: must lie in [0, duration/2]");
  }

  double end_time() const { return delay + duration; }
};

/// Envelope shape for a precomputed peak field; split out so integrators can
/// cache the peak instead of recomputing it every evaluation.
inline double pulse_envelope_shape(const PulseSpec& p, double peak, double t) {
  const double s = t - p.delay;
  if (s < 0.0 || s > p.duration) return 0.0;
  if (p.edge_time > 0.0) {
    if (s < p.edge_time)
      return peak * 0.5 * (1.0 - std::cos(constants::pi * s / p.edge_time));
    const double r = p.duration - s;
    if (r < p.edge_time)
      return peak * 0.5 * (1.0 - std::cos(constants::pi * r / p.edge_time));
  }
  return peak;
}

/// Incident field envelope at time t for a pulse focused to waist w0.
/// Real-valued; the drive carries no phase of its own.
inline double pulse_envelope(const PulseSpec& p, double waist, double t) {
  if (p.energy <= 0.0) return 0.0;
  return pulse_envelope_shape(p, peak_field_from_pulse(p.energy, p.duration, waist), t);
}

}  // namespace xpm

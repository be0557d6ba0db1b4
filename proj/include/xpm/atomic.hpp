#pragma once

#include <complex>
#include <stdexcept>

namespace xpm {

using complexd = std::complex<double>;

/// Rates, dipole moments and wavelengths of the three-level ladder
/// |0> -- control --> |1> -- probe --> |2>.
/// Rates are plain inverse seconds, dipoles C*m, wavelengths vacuum meters.
struct AtomicParams {
  double gamma1 = 3.2e7;     // total decay rate of |1>
  double gamma2 = 1.4e7;     // total decay rate of |2>
  double gamma0 = 0.0;       // decay of the metastable ground state, negligible here
  double Gamma10 = 2.9e7;    // spontaneous |1> -> |0>
  double Gamma21 = 6.5e4;    // spontaneous |2> -> |1>
  double mu10 = 7.6e-30;     // control transition dipole
  double mu21 = 1.2e-30;     // probe transition dipole
  double lambda_c = 823e-9;  // control wavelength
  double lambda_p = 853e-9;  // probe wavelength

  bool operator==(const AtomicParams&) const = default;

  void validate() const {
    if (!(gamma1 >= 0)) throw std::invalid_argument("atomic.gamma1_per_s: must be >= 0");
    if (!(gamma2 >= 0)) throw std::invalid_argument("atomic.gamma2_per_s: must be >= 0");
    if (!(gamma0 >= 0)) throw std::invalid_argument("atomic.gamma0_per_s: must be >= 0");
    if (!(Gamma10 >= 0)) throw std::invalid_argument("atomic.Gamma10_per_s: must be >= 0");
    if (!(Gamma21 >= 0)) throw std::invalid_argument("atomic.Gamma21_per_s: must be >= 0");
    if (!(Gamma10 <= gamma1))
      throw std::invalid_argument("atomic.Gamma10_per_s: branching exceeds gamma1_per_s");
    if (!(Gamma21 <= gamma2))
      throw std::invalid_argument("atomic.Gamma21_per_s: branching exceeds gamma2_per_s");
    if (!(mu10 > 0)) throw std::invalid_argument("atomic.mu10_cm: must be > 0");
    if (!(mu21 > 0)) throw std::invalid_argument("atomic.mu21_cm: must be > 0");
    if (!(lambda_c > 0)) throw std::invalid_argument("atomic.lambda_c_m: must be > 0");
    if (!(lambda_p > 0)) throw std::invalid_argument("atomic.lambda_p_m: must be > 0");
  }
};

/// Lower triangle of the ladder density matrix: three populations plus the
/// coherences sigma_10, sigma_21, sigma_20. Hermiticity is structural, the
/// upper triangle is the conjugate by construction.
struct DensityMatrix {
  double pop0 = 0.0;
  double pop1 = 0.0;
  double pop2 = 0.0;
  complexd coh10{};
  complexd coh21{};
  complexd coh20{};
};

/// Laser detunings in rad/s. Delta is the one-photon (control) detuning,
/// delta the two-photon detuning.
struct Detunings {
  double Delta = 0.0;
  double delta = 0.0;

  bool operator==(const Detunings&) const = default;
};

/// Complex Rabi amplitudes R = mu E / hbar in rad/s.
struct DriveAmplitudes {
  complexd R10{};
  complexd R21{};
};

struct DephasingRates {
  double gamma10;
  double gamma21;
  double gamma20;
};

/// Coherence damping rates, the arithmetic mean of the level widths.
inline DephasingRates dephasing_rates(const AtomicParams& p) {
  return {0.5 * (p.gamma1 + p.gamma0), 0.5 * (p.gamma2 + p.gamma1),
          0.5 * (p.gamma2 + p.gamma0)};
}

inline DensityMatrix ground_state() {
  DensityMatrix s;
  s.pop0 = 1.0;
  return s;
}

inline double trace(const DensityMatrix& s) { return s.pop0 + s.pop1 + s.pop2; }

/// Time derivative of the density matrix in the rotating frame.
/// Population exchange enters as i R sigma* - i R* sigma = -2 Im(R sigma*).
inline DensityMatrix bloch_rhs(const DensityMatrix& s, const DriveAmplitudes& d,
                               const Detunings& det, const AtomicParams& p) {
  const auto [g10, g21, g20] = dephasing_rates(p);
  constexpr complexd i{0.0, 1.0};
  const double x10 = 2.0 * std::imag(d.R10 * std::conj(s.coh10));
  const double x21 = 2.0 * std::imag(d.R21 * std::conj(s.coh21));

  DensityMatrix out;
  out.pop0 = p.Gamma10 * s.pop1 + x10;
  out.pop1 = -p.gamma1 * s.pop1 + p.Gamma21 * s.pop2 - x10 + x21;
  out.pop2 = -p.gamma2 * s.pop2 - x21;
  out.coh10 = complexd{-g10, det.Delta} * s.coh10 + i * d.R10 * (s.pop0 - s.pop1) +
              i * std::conj(d.R21) * s.coh20;
  out.coh21 = complexd{-g21, det.delta - det.Delta} * s.coh21 +
              i * d.R21 * (s.pop1 - s.pop2) - i * std::conj(d.R10) * s.coh20;
  out.coh20 = complexd{-g20, det.delta} * s.coh20 + i * d.R21 * s.coh10 -
              i * d.R10 * s.coh21;
  return out;
}

/// First-order steady-state control coherence, sigma_10 = i R10 / (gamma10 - i Delta).
inline complexd linear_steady_coherence(complexd R10, double Delta, double gamma10) {
  if (!(gamma10 > 0.0))
    throw std::domain_error("linear_steady_coherence: gamma10 must be > 0");
  return complexd{0.0, 1.0} * R10 / complexd{gamma10, -Delta};
}

}  // namespace xpm

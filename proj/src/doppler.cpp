#include "xpm/doppler.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "xpm/constants.hpp"

namespace xpm {

void DopplerSpec::validate() const {
  if (n_groups < 1)
    throw std::invalid_argument("doppler.n_groups: must be >= 1");
}

double velocity_sigma(double fwhm_hz, double lambda) {
  // FWHM of the shift distribution is 2 sqrt(2 ln 2) sigma_v / lambda.
  return lambda * fwhm_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

namespace {

// Orthonormal-recurrence Newton iteration for the Hermite roots, largest
// root first, mirrored onto the negative axis. Stable to a few hundred nodes.
void hermite_node(int n, double guess, double& node, double& weight) {
  constexpr double pi_quarter = 0.7511255444649425;  // pi^{-1/4}
  double x = guess;
  double pp = 0.0;
  for (int it = 0; it < 100; ++it) {
    double p1 = pi_quarter;
    double p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = x * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
    }
    pp = std::sqrt(2.0 * n) * p2;
    const double dx = p1 / pp;
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  node = x;
  weight = 2.0 / (pp * pp);
}

}  // namespace

Quadrature gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Quadrature q;
  q.nodes.assign(n, 0.0);
  q.weights.assign(n, 0.0);

  const int half = (n + 1) / 2;
  double x = 0.0;
  for (int i = 0; i < half; ++i) {
    // Standard initial guesses, largest root inward.
    if (i == 0)
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      x -= 1.14 * std::pow(n, 0.426) / x;
    else if (i == 2)
      x = 1.86 * x - 0.86 * q.nodes[0];
    else if (i == 3)
      x = 1.91 * x - 0.91 * q.nodes[1];
    else
      x = 2.0 * x - q.nodes[i - 2];

    double node, weight;
    hermite_node(n, x, node, weight);
    x = node;
    q.nodes[i] = node;
    q.weights[i] = weight;
    q.nodes[n - 1 - i] = -node;
    q.weights[n - 1 - i] = weight;
  }
  if (n % 2 == 1) q.nodes[half - 1] = 0.0;  // odd Hermite vanishes at the origin

  // Ascending order for reproducible reductions downstream.
  for (int i = 0; i < n / 2; ++i) {
    std::swap(q.nodes[i], q.nodes[n - 1 - i]);
    std::swap(q.weights[i], q.weights[n - 1 - i]);
  }
  return q;
}

std::vector<VelocityGroup> sample_velocities(const DopplerSpec& spec, double fwhm_hz,
                                             double lambda_c) {
  spec.validate();
  if (spec.mode == DopplerMode::off) return {{0.0, 1.0}};

  const double sigma = velocity_sigma(fwhm_hz, lambda_c);
  const int n = spec.n_groups;
  std::vector<VelocityGroup> groups;
  groups.reserve(n);

  if (spec.method == SampleMethod::monte_carlo) {
    // Box-Muller on top of mt19937_64 rather than std::normal_distribution,
    // whose stream is implementation-defined and would break seed pinning.
    std::mt19937_64 rng(spec.seed);
    const auto uniform = [&rng]() {
      return (rng() >> 11) * 0x1.0p-53;  // [0, 1)
    };
    const double w = 1.0 / n;
    for (int i = 0; i < n; i += 2) {
      const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
      const double u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double a = 2.0 * constants::pi * u2;
      groups.push_back({sigma * r * std::cos(a), w});
      if (i + 1 < n) groups.push_back({sigma * r * std::sin(a), w});
    }
    return groups;
  }

  Quadrature q = gauss_hermite(n);
  double wsum = 0.0;
  for (double w : q.weights) wsum += w;
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    groups.push_back({root2 * sigma * q.nodes[i], q.weights[i] / wsum});
  return groups;
}

Detunings shifted_detunings(const Detunings& det, double v, double lambda_c,
                            double lambda_p, DopplerMode mode) {
  if (mode == DopplerMode::off) return det;
  const double two_pi = 2.0 * constants::pi;
  Detunings out = det;
  out.Delta = det.Delta - two_pi * v / lambda_c;
  if (mode == DopplerMode::residual)
    out.delta = det.delta - two_pi * v * (1.0 / lambda_c - 1.0 / lambda_p);
  return out;
}

std::vector<double> ensemble_average(const std::vector<std::vector<double>>& series,
                                     const std::vector<double>& weights) {
  if (series.size() != weights.size())
    throw std::invalid_argument("ensemble_average: one weight per series required");
  if (series.empty()) return {};
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len)
      throw std::invalid_argument("ensemble_average: series grids differ in length");

  std::vector<double> out(len, 0.0);
  for (std::size_t g = 0; g < series.size(); ++g) {
    const double w = weights[g];
    const auto& s = series[g];
    for (std::size_t i = 0; i < len; ++i) out[i] += w * s[i];
  }
  return out;
}

double residual_two_photon_fwhm_hz(const std::vector<VelocityGroup>& groups,
                                   double lambda_c, double lambda_p) {
  const double mismatch = 1.0 / lambda_c - 1.0 / lambda_p;  // 1/m
  double mean = 0.0;
  for (const auto& g : groups) mean += g.weight * g.velocity;
  double var = 0.0;
  for (const auto& g : groups) {
    const double d = g.velocity - mean;
    var += g.weight * d * d;
  }
  return 2.0 * std::sqrt(2.0 * std::log(2.0)) * std::sqrt(var) * std::abs(mismatch);
}

}  // namespace xpm

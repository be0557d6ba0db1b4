#include <cmath>
#include <complex>

#include "doctest.h"
#include "xpm/atomic.hpp"

using namespace xpm;

namespace {

DensityMatrix scaled(const DensityMatrix& s, double a) {
  DensityMatrix out;
  out.pop0 = a * s.pop0;
  out.pop1 = a * s.pop1;
  out.pop2 = a * s.pop2;
  out.coh10 = a * s.coh10;
  out.coh21 = a * s.coh21;
  out.coh20 = a * s.coh20;
  return out;
}

DensityMatrix added(const DensityMatrix& a, const DensityMatrix& b) {
  DensityMatrix out;
  out.pop0 = a.pop0 + b.pop0;
  out.pop1 = a.pop1 + b.pop1;
  out.pop2 = a.pop2 + b.pop2;
  out.coh10 = a.coh10 + b.coh10;
  out.coh21 = a.coh21 + b.coh21;
  out.coh20 = a.coh20 + b.coh20;
  return out;
}

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
  double m = 0.0;
  m = std::max(m, std::abs(a.pop0 - b.pop0));
  m = std::max(m, std::abs(a.pop1 - b.pop1));
  m = std::max(m, std::abs(a.pop2 - b.pop2));
  m = std::max(m, std::abs(a.coh10 - b.coh10));
  m = std::max(m, std::abs(a.coh21 - b.coh21));
  m = std::max(m, std::abs(a.coh20 - b.coh20));
  return m;
}

// Classical RK4 on the density matrix alone, for the analytic oracles.
DensityMatrix rk4_evolve(DensityMatrix s, const DriveAmplitudes& d,
                         const Detunings& det, const AtomicParams& p, double dt,
                         long steps) {
  for (long i = 0; i < steps; ++i) {
    const DensityMatrix k1 = bloch_rhs(s, d, det, p);
    const DensityMatrix k2 = bloch_rhs(added(s, scaled(k1, 0.5 * dt)), d, det, p);
    const DensityMatrix k3 = bloch_rhs(added(s, scaled(k2, 0.5 * dt)), d, det, p);
    const DensityMatrix k4 = bloch_rhs(added(s, scaled(k3, dt)), d, det, p);
    DensityMatrix incr = added(added(k1, scaled(k2, 2.0)),
                               added(scaled(k3, 2.0), k4));
    s = added(s, scaled(incr, dt / 6.0));
  }
  return s;
}

AtomicParams undamped() {
  AtomicParams p;
  p.gamma1 = p.gamma2 = p.gamma0 = 0.0;
  p.Gamma10 = p.Gamma21 = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("atomic") {

TEST_CASE("dephasing rates are the mean of the level widths") {
  AtomicParams p;  // defaults: gamma1 3.2e7, gamma2 1.4e7, gamma0 0
  const auto [g10, g21, g20] = dephasing_rates(p);
  CHECK(g10 == 1.6e7);
  CHECK(g21 == 2.3e7);
  CHECK(g20 == 7e6);
}

TEST_CASE("dephasing rates degenerate cases") {
  AtomicParams p = undamped();
  auto r = dephasing_rates(p);
  CHECK(r.gamma10 == 0.0);
  CHECK(r.gamma21 == 0.0);
  CHECK(r.gamma20 == 0.0);

  p.gamma0 = p.gamma1 = p.gamma2 = 2.0e6;
  r = dephasing_rates(p);
  CHECK(r.gamma10 == 2.0e6);
  CHECK(r.gamma21 == 2.0e6);
  CHECK(r.gamma20 == 2.0e6);
}

TEST_CASE("ground state is the undriven fixed point") {
  const DensityMatrix g = ground_state();
  CHECK(g.pop0 == 1.0);
  CHECK(g.pop1 == 0.0);
  CHECK(g.pop2 == 0.0);
  CHECK(trace(g) == 1.0);

  const DensityMatrix d =
      bloch_rhs(g, DriveAmplitudes{}, Detunings{3e8, -1e7}, AtomicParams{});
  CHECK(max_abs_diff(d, DensityMatrix{}) == 0.0);
}

TEST_CASE("pure decay from the intermediate level") {
  DensityMatrix s;
  s.pop1 = 1.0;
  const AtomicParams p;
  const DensityMatrix d = bloch_rhs(s, DriveAmplitudes{}, Detunings{}, p);
  CHECK(d.pop0 == p.Gamma10);
  CHECK(d.pop1 == -p.gamma1);
  CHECK(d.pop2 == 0.0);
  CHECK(std::abs(d.coh10) == 0.0);
  CHECK(std::abs(d.coh21) == 0.0);
  CHECK(std::abs(d.coh20) == 0.0);
}

TEST_CASE("undamped resonant drive gives sin^2 population oscillation") {
  const AtomicParams p = undamped();
  const double R = 1e7;
  const DriveAmplitudes d{complexd{R, 0.0}, complexd{}};
  const double dt = 1e-10;

  DensityMatrix s = ground_state();
  double worst = 0.0;
  const long steps_per_sample = 100;
  for (int k = 1; k <= 100; ++k) {
    s = rk4_evolve(s, d, Detunings{}, p, dt, steps_per_sample);
    const double t = k * steps_per_sample * dt;
    const double expected = std::sin(R * t) * std::sin(R * t);
    worst = std::max(worst, std::abs(s.pop1 - expected));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("weak drive settles onto the linear steady coherence") {
  AtomicParams p;
  const double Delta = -5e7;
  const complexd R{1e3, 0.0};
  const DriveAmplitudes d{R, complexd{}};

  const DensityMatrix s =
      rk4_evolve(ground_state(), d, Detunings{Delta, 0.0}, p, 2e-10, 10000);
  const complexd expected =
      linear_steady_coherence(R, Delta, dephasing_rates(p).gamma10);
  CHECK(std::abs(s.coh10 - expected) < 1e-6 * std::abs(expected));
}

TEST_CASE("trace rate equals the leakage out of the three levels") {
  AtomicParams p;
  DensityMatrix s;
  s.pop0 = 0.4;
  s.pop1 = 0.35;
  s.pop2 = 0.2;
  s.coh10 = complexd{0.11, -0.07};
  s.coh21 = complexd{-0.05, 0.21};
  s.coh20 = complexd{0.02, 0.03};
  const DriveAmplitudes d{complexd{3e7, 1e7}, complexd{-2e7, 5e6}};

  const DensityMatrix out = bloch_rhs(s, d, Detunings{1e9, -3e7}, p);
  const double got = out.pop0 + out.pop1 + out.pop2;
  const double expected =
      -(p.gamma1 - p.Gamma10) * s.pop1 - (p.gamma2 - p.Gamma21) * s.pop2;
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("zero decay conserves the trace for any state and drive") {
  const AtomicParams p = undamped();
  DensityMatrix s;
  s.pop0 = 0.5;
  s.pop1 = 0.3;
  s.pop2 = 0.2;
  s.coh10 = complexd{0.9, -0.4};
  s.coh21 = complexd{-0.6, 0.8};
  s.coh20 = complexd{0.33, 0.12};
  const DriveAmplitudes d{complexd{4e8, -2e8}, complexd{1e8, 3e8}};

  const DensityMatrix out = bloch_rhs(s, d, Detunings{-2e9, 4e8}, p);
  CHECK(std::abs(out.pop0 + out.pop1 + out.pop2) < 1e-9 * 4e8);
}

TEST_CASE("rhs is linear in the state") {
  const AtomicParams p;
  const DriveAmplitudes d{complexd{2e7, -1e7}, complexd{5e6, 8e6}};
  const Detunings det{-5e9, 2e7};

  DensityMatrix s1;
  s1.pop0 = 0.7;
  s1.pop1 = 0.2;
  s1.coh10 = complexd{0.1, 0.2};
  s1.coh20 = complexd{-0.3, 0.05};
  DensityMatrix s2;
  s2.pop1 = 0.4;
  s2.pop2 = 0.6;
  s2.coh21 = complexd{0.25, -0.15};

  const double a = 1.7, b = -0.6;
  const DensityMatrix lhs =
      bloch_rhs(added(scaled(s1, a), scaled(s2, b)), d, det, p);
  const DensityMatrix rhs =
      added(scaled(bloch_rhs(s1, d, det, p), a), scaled(bloch_rhs(s2, d, det, p), b));
  CHECK(max_abs_diff(lhs, rhs) < 1e-12 * 5e9);
}

TEST_CASE("linear steady coherence formula") {
  const complexd c = linear_steady_coherence(complexd{1e6, 0.0}, 0.0, 1.6e7);
  CHECK(c.real() == doctest::Approx(0.0));
  CHECK(c.imag() == doctest::Approx(0.0625).epsilon(1e-12));

  CHECK(std::abs(linear_steady_coherence(complexd{}, 1e9, 1e7)) == 0.0);

  const double plus = std::abs(linear_steady_coherence(complexd{1e6, 0.0}, 3e8, 1.6e7));
  const double minus =
      std::abs(linear_steady_coherence(complexd{1e6, 0.0}, -3e8, 1.6e7));
  CHECK(plus == doctest::Approx(minus).epsilon(1e-14));

  CHECK_THROWS_AS(linear_steady_coherence(complexd{1.0, 0.0}, 0.0, 0.0),
                  std::domain_error);
}

TEST_CASE("parameter validation names the offending field") {
  AtomicParams p;
  p.gamma1 = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), "atomic.gamma1_per_s: must be >= 0",
                       std::invalid_argument);

  AtomicParams q;
  q.Gamma10 = q.gamma1 + 1.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);

  AtomicParams ok;
  CHECK_NOTHROW(ok.validate());
}

}  // TEST_SUITE

#pragma once

// CODATA 2018 values, SI units.
namespace xpm::constants {

inline constexpr double c = 299792458.0;          // m/s, exact
inline constexpr double h = 6.62607015e-34;       // J*s, exact
inline constexpr double hbar = 1.054571817e-34;   // J*s
inline constexpr double eps0 = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.141592653589793;

}  // namespace xpm::constants

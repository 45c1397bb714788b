#pragma once

// Physical constants, CODATA 2018. Values are frozen here; a test pins them
// so an accidental edit shows up as a failure rather than a silent drift of
// every derived quantity.
namespace eotk::constants {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double h_planck = 6.62607015e-34;   // J s
inline constexpr double k_b = 1.380649e-23;          // J/K
inline constexpr double c_light = 299792458.0;       // m/s
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double e_charge = 1.602176634e-19;  // C
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace eotk::constants

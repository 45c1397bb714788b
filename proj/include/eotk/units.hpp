#pragma once

#include <cmath>
#include <stdexcept>

#include "eotk/constants.hpp"

// Unit conversions used at the boundaries of the library. Internally every
// rate and frequency is angular (rad/s); user-facing values are ordinary
// frequency in Hz or power in dBm, converted exactly once at the edge.
namespace eotk::quantities {

inline double dbm_to_watts(double dbm) {
  return 1e-3 * std::pow(10.0, dbm / 10.0);
}

inline double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) {
    throw std::domain_error("watts_to_dbm: power must be positive");
  }
  return 10.0 * std::log10(watts / 1e-3);
}

// Loaded linewidth of a resonance, as an angular rate.
inline double rate_from_q(double f0_hz, double q) {
  if (!(f0_hz > 0.0) || !(q > 0.0)) {
    throw std::domain_error("rate_from_q: f0 and Q must be positive");
  }
  return constants::two_pi * f0_hz / q;
}

// Inverse of rate_from_q: quality factor from an angular loss rate.
inline double q_from_rate(double f0_hz, double rate_rad_s) {
  if (!(f0_hz > 0.0) || !(rate_rad_s > 0.0)) {
    throw std::domain_error("q_from_rate: f0 and rate must be positive");
  }
  return constants::two_pi * f0_hz / rate_rad_s;
}

// Photon flux (photons/s) carried by power at carrier frequency f_hz.
inline double photon_flux(double power_w, double f_hz) {
  if (!(f_hz > 0.0)) {
    throw std::domain_error("photon_flux: frequency must be positive");
  }
  if (power_w < 0.0) {
    throw std::domain_error("photon_flux: power must be non-negative");
  }
  return power_w / (constants::h_planck * f_hz);
}

inline double hz_to_rad(double f_hz) { return constants::two_pi * f_hz; }
inline double rad_to_hz(double w_rad) { return w_rad / constants::two_pi; }

}  // namespace eotk::quantities

#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "eotk/modes.hpp"

// BCS thin-film response: gap vs temperature, complex conductivity, surface
// impedance, quasiparticle densities/lifetimes, and the composite resonator
// frequency/Q response used for film thermometry.
//
// Conventions: temperatures in K, energies in J, omega angular (rad/s).
// Densities are reported per um^3 to match tabulated material data.
namespace eotk::sc {

using quantities::SuperconductorParams;

struct GapState {
  double delta = 0.0;        // J; 0 above Tc
  double temperature = 0.0;  // K
};

struct ComplexConductivity {
  double sigma1 = 0.0;  // normalized to sigma_n
  double sigma2 = 0.0;  // normalized to sigma_n
  double delta = 0.0;   // gap used, J
};

struct SurfaceImpedance {
  std::complex<double> zs;  // ohm/sq
  double rs = 0.0;          // ohm/sq
  double ls = 0.0;          // H/sq
};

struct QuasiparticleState {
  double density = 0.0;      // um^-3
  double temperature = 0.0;  // K
  double lifetime = 0.0;     // s; +inf when the density is zero and no clamp is set
};

struct ResonatorResponse {
  double f0_hz = 0.0;      // shifted resonance
  double q_qp = 0.0;       // quasiparticle-limited quality factor
  double gamma_qp = 0.0;   // rad/s, omega/q_qp
  double alpha_k = 0.0;    // kinetic fraction at this temperature
};

// Thread-safe memo for the gap solve, keyed by temperature. One cache is
// valid for exactly one parameter set; sweeps share it across threads.
class GapCache {
 public:
  bool lookup(double t, double* delta) const;
  void store(double t, double delta);

 private:
  mutable std::mutex mu_;
  std::map<double, double> table_;
};

// Self-consistent Delta(T) with the Debye-energy cutoff calibrated so that
// Delta(0) = params.delta0. Returns delta = 0 at or above Tc.
GapState gap_at_temperature(const SuperconductorParams& p, double t, GapCache* cache = nullptr);

// Mattis-Bardeen sigma1/sigma_n and sigma2/sigma_n in the sub-gap regime
// (hbar*omega < 2*Delta(T)); throws std::domain_error outside it.
ComplexConductivity complex_conductivity(const SuperconductorParams& p, double omega, double t,
                                         GapCache* cache = nullptr);

// Thin-film surface impedance with thickness correction:
//   Zs = sqrt(i mu0 omega / sigma) * coth(d * sqrt(i omega mu0 sigma)).
SurfaceImpedance surface_impedance(const SuperconductorParams& p, double omega, double t,
                                   GapCache* cache = nullptr);

// Thermal quasiparticle density (um^-3) at temperature t.
QuasiparticleState qp_density(const SuperconductorParams& p, double t, GapCache* cache = nullptr);

// Inverse of qp_density by bisection on [1 mK, Tc].
QuasiparticleState qp_temperature(const SuperconductorParams& p, double density_um3,
                                  GapCache* cache = nullptr);

// Recombination-limited lifetime, tau = (tau0/n) * N0 (kB Tc)^3 / (2 Delta0^2).
double qp_lifetime(const SuperconductorParams& p, double density_um3);

// Recombination constant K in um^-3 s, so that tau_qp = K / n_qp.
double recombination_constant(const SuperconductorParams& p);

// Resonator observables at temperature t for a resonator with cold resonance
// f0_cold and cold kinetic-inductance fraction alpha_k:
//   f0(T) = f0_cold / sqrt(1 - a + a * Ls(T)/Ls(0))
//   Q_qp(T) = (1/alpha_k(T)) * omega * Ls(T) / Rs(T)
// Surface impedance is probed at the cold resonance frequency.
ResonatorResponse resonator_response(const SuperconductorParams& p, double f0_cold_hz,
                                     double alpha_k_cold, double t, GapCache* cache = nullptr);

// Film temperature, quasiparticle density and lifetime that produce the
// observed frequency shift df_hz (negative when the resonance moved down
// from its cold value). Monotone bisection through resonator_response.
QuasiparticleState invert_frequency_shift(const SuperconductorParams& p, double f0_cold_hz,
                                          double alpha_k_cold, double df_hz,
                                          GapCache* cache = nullptr);

}  // namespace eotk::sc

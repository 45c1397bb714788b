#pragma once

#include <string>

// Mode and material parameter records. Constructors enforce the rate
// composition rules so a physically inconsistent device cannot circulate
// through the rest of the library. All rates are angular (rad/s).
namespace eotk::quantities {

// Single-sided optical cavity: one coupling port, kappa_tot = kappa_i + kappa_e.
struct OpticalMode {
  double omega = 0.0;      // rad/s
  double kappa_i = 0.0;    // rad/s
  double kappa_e = 0.0;    // rad/s
  double kappa_tot = 0.0;  // rad/s

  OpticalMode() = default;
  OpticalMode(double omega_, double kappa_i_, double kappa_e_);

  double f0_hz() const;
  double q_total() const { return omega / kappa_tot; }
};

// Two-sided microwave resonator: two equal coupling ports,
// gamma_tot = gamma_i + 2 gamma_e (gamma_e is the per-port rate).
struct MicrowaveMode {
  double omega = 0.0;      // rad/s
  double gamma_i = 0.0;    // rad/s
  double gamma_e = 0.0;    // rad/s, per port
  double gamma_tot = 0.0;  // rad/s

  MicrowaveMode() = default;
  MicrowaveMode(double omega_, double gamma_i_, double gamma_e_);

  double f0_hz() const;
};

struct DeviceParams {
  OpticalMode optical;
  MicrowaveMode microwave;
  double impedance_ohm = 0.0;  // microwave mode impedance seen by the EO interaction
  double g0 = 0.0;             // rad/s; 0 means "not set, derive it"

  DeviceParams() = default;
  DeviceParams(OpticalMode o, MicrowaveMode m, double z, double g0_ = 0.0);
};

// BCS superconductor film parameters.
struct SuperconductorParams {
  double sigma_n = 0.0;            // normal-state conductivity, S/m
  double t_c = 0.0;                // critical temperature, K
  double delta0 = 0.0;             // zero-temperature gap, J
  double n0 = 0.0;                 // single-spin density of states at E_F, 1/(J m^3)
  double thickness = 0.0;          // film thickness, m
  double tau0 = 0.0;               // electron-phonon time, s
  double debye_temperature = 0.0;  // pairing cutoff k_B*T_D, K
  double ls_ref = 0.0;             // tabulated sheet inductance at T=0, H/sq; 0 if unset
  double tau_qp_max = 0.0;         // lifetime saturation clamp, s; 0 disables it

  SuperconductorParams() = default;
  SuperconductorParams(double sigma_n_, double t_c_, double delta0_, double n0_,
                       double thickness_, double tau0_, double debye_temperature_,
                       double ls_ref_ = 0.0, double tau_qp_max_ = 0.0);

  // Coupling strength N0*V implied by the T=0 gap equation with the
  // Debye-energy cutoff; cached at construction.
  double n0v() const { return n0v_; }

 private:
  double n0v_ = 0.0;
};

// Helpers for building SuperconductorParams from tabulated material numbers.
double ev_to_joule(double ev);
double per_ev_per_um3_to_si(double v);  // 1/(eV um^3) -> 1/(J m^3)

}  // namespace eotk::quantities

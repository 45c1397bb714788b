#include "eotk/modes.hpp"

#include <cmath>
#include <stdexcept>

#include "eotk/constants.hpp"

namespace eotk::quantities {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

OpticalMode::OpticalMode(double omega_, double kappa_i_, double kappa_e_)
    : omega(omega_), kappa_i(kappa_i_), kappa_e(kappa_e_), kappa_tot(kappa_i_ + kappa_e_) {
  require_positive(omega, "OpticalMode omega");
  require_positive(kappa_i, "OpticalMode kappa_i");
  require_positive(kappa_e, "OpticalMode kappa_e");
}

double OpticalMode::f0_hz() const { return omega / constants::two_pi; }

MicrowaveMode::MicrowaveMode(double omega_, double gamma_i_, double gamma_e_)
    : omega(omega_), gamma_i(gamma_i_), gamma_e(gamma_e_), gamma_tot(gamma_i_ + 2.0 * gamma_e_) {
  require_positive(omega, "MicrowaveMode omega");
  require_positive(gamma_i, "MicrowaveMode gamma_i");
  require_positive(gamma_e, "MicrowaveMode gamma_e");
}

double MicrowaveMode::f0_hz() const { return omega / constants::two_pi; }

DeviceParams::DeviceParams(OpticalMode o, MicrowaveMode m, double z, double g0_)
    : optical(o), microwave(m), impedance_ohm(z), g0(g0_) {
  require_positive(impedance_ohm, "DeviceParams impedance");
  if (g0 < 0.0) throw std::invalid_argument("DeviceParams g0 must be non-negative");
}

SuperconductorParams::SuperconductorParams(double sigma_n_, double t_c_, double delta0_,
                                           double n0_, double thickness_, double tau0_,
                                           double debye_temperature_, double ls_ref_,
                                           double tau_qp_max_)
    : sigma_n(sigma_n_),
      t_c(t_c_),
      delta0(delta0_),
      n0(n0_),
      thickness(thickness_),
      tau0(tau0_),
      debye_temperature(debye_temperature_),
      ls_ref(ls_ref_),
      tau_qp_max(tau_qp_max_) {
  if (ls_ref < 0.0 || tau_qp_max < 0.0) {
    throw std::invalid_argument("SuperconductorParams: ls_ref/tau_qp_max must be non-negative");
  }
  require_positive(sigma_n, "SuperconductorParams sigma_n");
  require_positive(t_c, "SuperconductorParams t_c");
  require_positive(delta0, "SuperconductorParams delta0");
  require_positive(n0, "SuperconductorParams n0");
  require_positive(thickness, "SuperconductorParams thickness");
  require_positive(tau0, "SuperconductorParams tau0");
  require_positive(debye_temperature, "SuperconductorParams debye_temperature");

  // Weak-coupling BCS ties the gap to Tc; reject parameter sets that are not
  // self-consistent within 2%, they would silently skew every derived rate.
  const double ratio = delta0 / (constants::k_b * t_c);
  if (std::abs(ratio / 1.764 - 1.0) > 0.02) {
    throw std::invalid_argument("SuperconductorParams: delta0/(kB*Tc) deviates from 1.764 by >2%");
  }

  const double ed = constants::k_b * debye_temperature;
  if (ed <= delta0 * 2.0) {
    throw std::invalid_argument("SuperconductorParams: Debye energy too close to the gap");
  }
  n0v_ = 1.0 / std::acosh(ed / delta0);
}

double ev_to_joule(double ev) { return ev * constants::e_charge; }

double per_ev_per_um3_to_si(double v) { return v / constants::e_charge * 1e18; }

}  // namespace eotk::quantities

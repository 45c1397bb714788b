#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "eotk/modes.hpp"
#include "eotk/parallel.hpp"

// Electro-optic transduction model: per-volt tuning of the optical cavity,
// vacuum coupling rate, intracavity photon number, cooperativity and
// microwave-to-optical conversion efficiency, plus the stray-light heating
// feedback that saturates the efficiency at high pump power.
namespace eotk::eo {

// Poled-polymer stack parameters. Defaults describe a typical high-r33
// chromophore film with partial poling; field_per_volt must be supplied
// (directly or via field_per_volt_parallel_plate).
struct PolymerParams {
  double r33_film = 105e-12;           // thin-film Pockels coefficient, m/V
  double poling_efficiency = 0.4;      // in-device r33 relative to thin film
  double n_e = 1.70;                   // extraordinary refractive index
  double n_o = 1.65;                   // ordinary refractive index
  double mode_energy_fraction = 0.35;  // optical mode energy inside the polymer
  double field_per_volt = 0.0;         // RF field along poling axis per volt, 1/m

  void validate() const;  // throws std::domain_error on out-of-range fields
};

// Diagonal relative-permittivity tensor at one grid cell.
struct Tensor3 {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
};

// Rectangular cross-section sample of an optical mode and the permittivity
// perturbation induced by the applied RF field. Arrays are row-major with
// index iy * nx + ix; the perturbation must vanish off the polymer region.
struct FieldGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;  // m
  double dy = 0.0;  // m
  std::vector<std::complex<double>> ex, ey, ez;  // optical field components
  std::vector<Tensor3> eps;                      // relative permittivity
  std::vector<Tensor3> delta_eps;                // perturbation at v_applied
  std::vector<std::uint8_t> polymer_mask;        // 1 inside the polymer

  std::size_t size() const { return nx * ny; }
  void validate() const;  // shape and mask/perturbation consistency
};

struct PumpConfig {
  double power_w = 0.0;   // optical power at the cavity input
  double detuning = 0.0;  // rad/s, pump frequency minus cavity frequency
};

struct ConversionResult {
  double n_cav = 0.0;
  double cooperativity = 0.0;
  double efficiency = 0.0;
  double bandwidth_fwhm_hz = 0.0;   // FWHM of efficiency vs RF detuning
  double sideband_ratio_db = 0.0;   // filled when the pump detuning is known
  double g0 = 0.0;                  // rad/s
  double efficiency_err = 0.0;      // linearized from a declared g0 uncertainty
  double g0_err = 0.0;              // linearized from a declared eta uncertainty
};

// Stray pump light heating the superconducting film: a declared fraction of
// the pump power breaks pairs in the film volume, and the resulting
// quasiparticle bath adds microwave loss through the film response.
struct StrayLightModel {
  double absorbed_fraction = 0.0;  // pump power fraction absorbed in the film
  double film_volume_um3 = 0.0;    // metal volume exposed to quasiparticles
  double base_density_um3 = 0.0;   // residual density with the pump off
  double mw_alpha_k = 0.0;         // kinetic fraction of the microwave mode
  quantities::SuperconductorParams film;
};

struct PowerSweepPoint {
  double power_w = 0.0;
  double n_cav = 0.0;
  double qp_density_um3 = 0.0;
  double gamma_tot = 0.0;  // rad/s, including light-induced loss
  double efficiency = 0.0;
  std::string error;  // non-empty when this point left the model's range
};

// Uniform-field estimate of the RF field per applied volt across a gap,
// reduced by a screening factor for the dielectric stack in between.
double field_per_volt_parallel_plate(double gap_m, double screening = 0.8);

// Per-volt optical tuning rate from sampled mode fields by first-order
// perturbation theory: -(omega/2V) * (sum over polymer of E*.deltaEps.E) /
// (sum over all cells of E*.eps.E), midpoint quadrature on the grid.
// Throws std::invalid_argument when the mode normalization vanishes.
double tuning_rate_from_fields(const FieldGrid& grid, double v_applied, double omega_opt,
                               parallel::ExecPolicy policy = parallel::ExecPolicy::kSerial);

// Compact estimate of the same rate from scalar overlap parameters:
// 0.5 * omega * n_e^2 * (poling_efficiency * r33_film) * field_per_volt *
// mode_energy_fraction.
double tuning_rate_approx(const PolymerParams& p, double omega_opt);

// Per-volt tuning rate implied by a measured wavelength tuning (m/V).
double gv_from_wavelength_tuning(double tuning_m_per_v, double wavelength_m);

// RMS zero-point voltage of a microwave mode of the given impedance.
double zero_point_voltage(double omega_mw, double impedance_ohm);

// Vacuum electro-optic coupling rate.
double coupling_g0(double g_v, double v_zpf);

// Steady-state intracavity photon number of a single-sided cavity.
double intracavity_photons(const PumpConfig& pump, const quantities::OpticalMode& o);

// Cooperativity and conversion efficiency at a given photon number, using
// the device's stored g0. A declared g0 uncertainty propagates linearly to
// the efficiency uncertainty.
ConversionResult conversion_efficiency(const quantities::DeviceParams& dev, double n_cav,
                                       double g0_err = 0.0);

// Low-cooperativity inversion: the g0 that reproduces a measured efficiency
// at the given photon number. Throws std::invalid_argument for n_cav <= 0.
double infer_g0(double eta, const quantities::DeviceParams& dev, double n_cav);

// Linearized uncertainty of infer_g0 for a declared efficiency uncertainty.
double infer_g0_uncertainty(double g0, double eta, double eta_err);

// Lorentzian conversion response vs RF drive detuning; FWHM = gamma_tot.
std::vector<double> efficiency_vs_rf_detuning(const quantities::DeviceParams& dev, double n_cav,
                                              const std::vector<double>& delta_rf);

// Cavity filter contrast between the upper and lower scattered sidebands, in
// dB, for a pump detuned by pump_detuning from the cavity.
double sideband_ratio_db(const quantities::OpticalMode& o, double omega_mw,
                         double pump_detuning);

// Efficiency vs pump power with stray-light heating folded into the
// microwave internal loss. Points are independent and may run in parallel;
// output order follows the input grid.
std::vector<PowerSweepPoint> efficiency_vs_pump_power(
    const quantities::DeviceParams& dev, const std::vector<double>& powers_w,
    double pump_detuning, const StrayLightModel& stray,
    parallel::ExecPolicy policy = parallel::ExecPolicy::kSerial);

}  // namespace eotk::eo

#include "eotk/eo_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/superconductor.hpp"

namespace eotk::eo {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}
}  // namespace

void PolymerParams::validate() const {
  require(r33_film > 0.0, "PolymerParams: r33_film must be positive");
  require(poling_efficiency >= 0.0 && poling_efficiency <= 1.0,
          "PolymerParams: poling_efficiency must lie in [0, 1]");
  require(mode_energy_fraction >= 0.0 && mode_energy_fraction <= 1.0,
          "PolymerParams: mode_energy_fraction must lie in [0, 1]");
  require(n_e > 0.0 && n_o > 0.0, "PolymerParams: refractive indices must be positive");
  require(field_per_volt >= 0.0, "PolymerParams: field_per_volt must be non-negative");
}

void FieldGrid::validate() const {
  if (nx == 0 || ny == 0 || !(dx > 0.0) || !(dy > 0.0)) {
    throw std::invalid_argument("FieldGrid: grid shape and spacing must be positive");
  }
  const std::size_t n = size();
  if (ex.size() != n || ey.size() != n || ez.size() != n || eps.size() != n ||
      delta_eps.size() != n || polymer_mask.size() != n) {
    throw std::invalid_argument("FieldGrid: all per-cell arrays must share the grid shape");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (polymer_mask[i] == 0 &&
        (delta_eps[i].xx != 0.0 || delta_eps[i].yy != 0.0 || delta_eps[i].zz != 0.0)) {
      throw std::invalid_argument(
          "FieldGrid: permittivity perturbation must vanish outside the polymer region");
    }
  }
}

double field_per_volt_parallel_plate(double gap_m, double screening) {
  require(gap_m > 0.0, "field_per_volt_parallel_plate: gap must be positive");
  require(screening > 0.0 && screening <= 1.0,
          "field_per_volt_parallel_plate: screening must lie in (0, 1]");
  return screening / gap_m;
}

double tuning_rate_from_fields(const FieldGrid& grid, double v_applied, double omega_opt,
                               parallel::ExecPolicy policy) {
  grid.validate();
  if (v_applied == 0.0) {
    throw std::invalid_argument("tuning_rate_from_fields: applied voltage must be nonzero");
  }
  // Row-wise partial sums keep the reduction order fixed regardless of the
  // execution policy, so serial and parallel runs agree bitwise.
  const auto row_sum = [&](std::size_t iy, bool perturbation) {
    double acc = 0.0;
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t i = iy * grid.nx + ix;
      const Tensor3& t = perturbation ? grid.delta_eps[i] : grid.eps[i];
      acc += t.xx * std::norm(grid.ex[i]) + t.yy * std::norm(grid.ey[i]) +
             t.zz * std::norm(grid.ez[i]);
    }
    return acc;
  };
  const double num = parallel::indexed_sum(policy, grid.ny,
                                           [&](std::size_t iy) { return row_sum(iy, true); });
  const double den = parallel::indexed_sum(policy, grid.ny,
                                           [&](std::size_t iy) { return row_sum(iy, false); });
  if (!(den > 0.0)) {
    throw std::invalid_argument("tuning_rate_from_fields: mode normalization vanished");
  }
  return -(omega_opt / (2.0 * v_applied)) * (num / den);
}

double tuning_rate_approx(const PolymerParams& p, double omega_opt) {
  p.validate();
  const double r33_eff = p.poling_efficiency * p.r33_film;
  return 0.5 * omega_opt * p.n_e * p.n_e * r33_eff * p.field_per_volt *
         p.mode_energy_fraction;
}

double gv_from_wavelength_tuning(double tuning_m_per_v, double wavelength_m) {
  require(wavelength_m > 0.0, "gv_from_wavelength_tuning: wavelength must be positive");
  return constants::two_pi * constants::c_light * tuning_m_per_v /
         (wavelength_m * wavelength_m);
}

double zero_point_voltage(double omega_mw, double impedance_ohm) {
  require(impedance_ohm > 0.0, "zero_point_voltage: impedance must be positive");
  return omega_mw * std::sqrt(constants::hbar * impedance_ohm / 2.0);
}

double coupling_g0(double g_v, double v_zpf) { return g_v * v_zpf; }

double intracavity_photons(const PumpConfig& pump, const quantities::OpticalMode& o) {
  require(pump.power_w >= 0.0, "intracavity_photons: pump power must be non-negative");
  const double flux = pump.power_w / (constants::hbar * o.omega);
  const double half = 0.5 * o.kappa_tot;
  return o.kappa_e * flux / (half * half + pump.detuning * pump.detuning);
}

ConversionResult conversion_efficiency(const quantities::DeviceParams& dev, double n_cav,
                                       double g0_err) {
  require(n_cav >= 0.0, "conversion_efficiency: photon number must be non-negative");
  const auto& o = dev.optical;
  const auto& m = dev.microwave;
  ConversionResult out;
  out.n_cav = n_cav;
  out.g0 = dev.g0;
  const double c = 4.0 * dev.g0 * dev.g0 * n_cav / (o.kappa_tot * m.gamma_tot);
  out.cooperativity = c;
  const double extraction = (o.kappa_e / o.kappa_tot) * (m.gamma_e / m.gamma_tot);
  out.efficiency = extraction * 4.0 * c / ((1.0 + c) * (1.0 + c));
  out.bandwidth_fwhm_hz = m.gamma_tot / constants::two_pi;
  if (g0_err > 0.0 && dev.g0 > 0.0) {
    // d(eta)/d(g0) = eta * 2 (1 - C) / (g0 (1 + C))
    out.g0_err = g0_err;
    out.efficiency_err =
        std::abs(out.efficiency * 2.0 * (1.0 - c) / (dev.g0 * (1.0 + c))) * g0_err;
  }
  return out;
}

double infer_g0(double eta, const quantities::DeviceParams& dev, double n_cav) {
  require(eta >= 0.0, "infer_g0: efficiency must be non-negative");
  if (!(n_cav > 0.0)) {
    throw std::invalid_argument("infer_g0: photon number must be positive");
  }
  const auto& o = dev.optical;
  const auto& m = dev.microwave;
  return o.kappa_tot * m.gamma_tot / (4.0 * std::sqrt(n_cav)) *
         std::sqrt(eta / (o.kappa_e * m.gamma_e));
}

double infer_g0_uncertainty(double g0, double eta, double eta_err) {
  if (!(eta > 0.0) || eta_err <= 0.0) return 0.0;
  return 0.5 * g0 / eta * eta_err;  // g0 scales as sqrt(eta)
}

std::vector<double> efficiency_vs_rf_detuning(const quantities::DeviceParams& dev, double n_cav,
                                              const std::vector<double>& delta_rf) {
  if (delta_rf.empty()) {
    throw std::invalid_argument("efficiency_vs_rf_detuning: detuning grid is empty");
  }
  const double eta_peak = conversion_efficiency(dev, n_cav).efficiency;
  const double half = 0.5 * dev.microwave.gamma_tot;
  std::vector<double> out(delta_rf.size());
  for (std::size_t i = 0; i < delta_rf.size(); ++i) {
    const double d = delta_rf[i];
    out[i] = eta_peak * half * half / (half * half + d * d);
  }
  return out;
}

double sideband_ratio_db(const quantities::OpticalMode& o, double omega_mw,
                         double pump_detuning) {
  const double half2 = 0.25 * o.kappa_tot * o.kappa_tot;
  const double up = half2 + (pump_detuning - omega_mw) * (pump_detuning - omega_mw);
  const double down = half2 + (pump_detuning + omega_mw) * (pump_detuning + omega_mw);
  return 10.0 * std::log10(up / down);
}

std::vector<PowerSweepPoint> efficiency_vs_pump_power(
    const quantities::DeviceParams& dev, const std::vector<double>& powers_w,
    double pump_detuning, const StrayLightModel& stray, parallel::ExecPolicy policy) {
  if (powers_w.empty()) {
    throw std::invalid_argument("efficiency_vs_pump_power: power grid is empty");
  }
  require(stray.absorbed_fraction >= 0.0 && stray.absorbed_fraction <= 1.0,
          "efficiency_vs_pump_power: absorbed fraction must lie in [0, 1]");
  const bool heating = stray.absorbed_fraction > 0.0;
  if (heating) {
    require(stray.film_volume_um3 > 0.0,
            "efficiency_vs_pump_power: film volume must be positive");
    require(stray.mw_alpha_k > 0.0 && stray.mw_alpha_k < 1.0,
            "efficiency_vs_pump_power: kinetic fraction must lie in (0, 1)");
  }
  const double recomb = heating ? sc::recombination_constant(stray.film) : 0.0;
  const double f0_mw = dev.microwave.f0_hz();
  sc::GapCache cache;

  // Loss added by the light-off quasiparticle background is already part of
  // the calibrated gamma_i; only the excess above it enters the sweep.
  double gamma_qp_base = 0.0;
  if (heating && stray.base_density_um3 > 0.0) {
    const double t_base =
        sc::qp_temperature(stray.film, stray.base_density_um3, &cache).temperature;
    gamma_qp_base =
        sc::resonator_response(stray.film, f0_mw, stray.mw_alpha_k, t_base, &cache).gamma_qp;
  }

  std::vector<PowerSweepPoint> out(powers_w.size());
  // Exceptions must not escape the parallel loop; a point that leaves the
  // film model's range (e.g. driven normal) carries its error instead.
  parallel::parallel_for(policy, powers_w.size(), [&](std::size_t i) {
    PowerSweepPoint pt;
    pt.power_w = powers_w[i];
    try {
      quantities::DeviceParams local = dev;
      pt.qp_density_um3 = stray.base_density_um3;
      if (heating) {
        const double gen = stray.absorbed_fraction * pt.power_w /
                           (stray.film.delta0 * stray.film_volume_um3);  // um^-3 s^-1
        pt.qp_density_um3 = std::sqrt(gen * recomb +
                                      stray.base_density_um3 * stray.base_density_um3);
        if (pt.qp_density_um3 > stray.base_density_um3) {
          const double t =
              sc::qp_temperature(stray.film, pt.qp_density_um3, &cache).temperature;
          const double gamma_qp =
              sc::resonator_response(stray.film, f0_mw, stray.mw_alpha_k, t, &cache).gamma_qp;
          const double extra = std::max(0.0, gamma_qp - gamma_qp_base);
          local.microwave = quantities::MicrowaveMode(
              dev.microwave.omega, dev.microwave.gamma_i + extra, dev.microwave.gamma_e);
        }
      }
      const PumpConfig pump{pt.power_w, pump_detuning};
      pt.n_cav = intracavity_photons(pump, local.optical);
      pt.gamma_tot = local.microwave.gamma_tot;
      pt.efficiency = conversion_efficiency(local, pt.n_cav).efficiency;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out[i] = pt;
  });
  return out;
}

}  // namespace eotk::eo

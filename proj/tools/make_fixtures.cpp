// Regenerates the bundled data/ fixtures from the library itself:
//   - table1.json            device summary config with declared cross-checks
//   - fig6c_signal/dark.csv  synthetic heterodyne pair with a known flux
//   - calibrate_fig6c.json   calibration config for those traces
//   - optical_table1.csv     synthetic optical reflection dip
//   - fit_optical.json       fano-fit config for that spectrum
//   - decay_655us.csv        noiseless exponential decay
//   - decay_450us_noisy.csv  1% multiplicative noise, seeded
//   - fit_decay.json         exponential-fit config
//   - power_sweep.json       pump-power sweep with the stray-light model on
//
// Usage: make_fixtures [output_dir]   (default: data)
//
// CSV paths inside the bundled configs are relative to the repository root,
// so the eotk examples in the README run from there.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "eotk/constants.hpp"
#include "eotk/dynamics.hpp"
#include "eotk/spectra.hpp"
#include "eotk/units.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
  std::printf("wrote %s\n", path.string().c_str());
}

ordered_json table1_device() {
  ordered_json device;
  device["optical"] = {{"wavelength_nm", 1557.92},
                       {"kappa_i_hz", 2.07e9},
                       {"kappa_e_hz", 7.61e9},
                       {"kappa_tot_hz", 9.68e9}};
  device["microwave"] = {{"frequency_hz", 6.672e9},
                         {"gamma_i_hz", 2.53e6},
                         {"gamma_e_hz", 1.91e6},
                         {"gamma_tot_hz", 6.35e6}};
  device["impedance_ohm"] = 100.0;
  device["g0_hz"] = 330.0;
  device["tuning_pm_per_v"] = 1.1;
  device["g0_predicted_hz"] = 400.0;
  return device;
}

ordered_json table2_superconductor() {
  return {{"sigma_n_s_per_m", 1.3e8}, {"t_c_k", 1.1},
          {"delta0_uev", 167.0},      {"n0_per_ev_um3", 1.72e10},
          {"thickness_nm", 100.0},    {"tau0_ns", 458.0},
          {"debye_temperature_k", 433.0}, {"ls_ref_fh_per_sq", 140.0}};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? argv[1] : "data";
  fs::create_directories(dir);
  using eotk::constants::two_pi;

  // Device summary config.
  {
    ordered_json j;
    j["schema_version"] = 1;
    j["device"] = table1_device();
    j["pump"] = {{"power_dbm", 0.0}, {"detuning_hz", -6.672e9}};
    write_json(dir / "table1.json", j);
  }

  // Heterodyne pair carrying a sideband flux that corresponds to an
  // efficiency of exactly 2.2e-9 for a -31 dBm drive at 6.672 GHz.
  {
    const double rf_power_w = eotk::quantities::dbm_to_watts(-31.0);
    const double omega_mw = two_pi * 6.672e9;
    const double incident_flux = rf_power_w / (eotk::constants::hbar * omega_mw);
    const double flux = 2.2e-9 * incident_flux;

    std::vector<eotk::spectra::SidebandTone> tones = {{40.0e6, flux}};
    eotk::spectra::DarkModel dark{2.0e-18, 1.0e-27};
    eotk::spectra::HeterodyneGrid grid{39.5e6, 40.5e6, 4001};
    auto pair = eotk::spectra::synthesize_heterodyne(tones, 1.0e-17, 1.0e3, dark, grid);
    eotk::spectra::write_spectrum_csv(pair.signal, (dir / "fig6c_signal.csv").string());
    eotk::spectra::write_spectrum_csv(pair.dark, (dir / "fig6c_dark.csv").string());
    std::printf("wrote %s (+sidecar)\n", (dir / "fig6c_signal.csv").string().c_str());
    std::printf("wrote %s (+sidecar)\n", (dir / "fig6c_dark.csv").string().c_str());

    ordered_json j;
    j["schema_version"] = 1;
    j["calibrate"] = {{"signal_csv", "data/fig6c_signal.csv"},
                      {"dark_csv", "data/fig6c_dark.csv"},
                      {"window_lo_hz", 39.9e6},
                      {"window_hi_hz", 40.1e6},
                      {"rf_power_dbm", -31.0},
                      {"mw_frequency_hz", 6.672e9}};
    write_json(dir / "calibrate_fig6c.json", j);
  }

  // Optical reflection dip with the summary-table linewidths. A phase-zero
  // dip cannot distinguish internal from external coupling, so the matching
  // fit config pins the over-coupled branch.
  {
    eotk::spectra::FanoLorentzian m;
    m.f0_hz = eotk::constants::c_light / 1557.92e-9;
    m.kappa_i_hz = 2.07e9;
    m.kappa_e_hz = 7.61e9;
    m.fano_phase = 0.0;
    m.scale = 1.0;
    std::vector<double> f(6001);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = m.f0_hz - 30.0e9 + 60.0e9 * static_cast<double>(i) / (f.size() - 1);
    }
    auto s = eotk::spectra::eval_lineshape(m, f, 0.0,
                                           eotk::spectra::SpectrumKind::kOpticalReflection);
    eotk::spectra::write_spectrum_csv(s, (dir / "optical_table1.csv").string());
    std::printf("wrote %s (+sidecar)\n", (dir / "optical_table1.csv").string().c_str());

    ordered_json j;
    j["schema_version"] = 1;
    j["fit"] = {{"model", "fano"},
                {"data_csv", "data/optical_table1.csv"},
                {"guess", "over_coupled"}};
    write_json(dir / "fit_optical.json", j);
  }

  // Exponential decays: a noiseless 655 us constant and a 450 us constant
  // under 1% multiplicative noise with a fixed seed.
  {
    eotk::dynamics::TimeSeries ts;
    ts.time_s.resize(2001);
    ts.value.resize(ts.time_s.size());
    for (std::size_t i = 0; i < ts.time_s.size(); ++i) {
      double t = 5.0e-3 * static_cast<double>(i) / (ts.time_s.size() - 1);
      ts.time_s[i] = t;
      ts.value[i] = 0.8 * std::exp(-t / 655.0e-6) + 0.05;
    }
    eotk::dynamics::write_time_series_csv(ts, (dir / "decay_655us.csv").string());
    std::printf("wrote %s\n", (dir / "decay_655us.csv").string().c_str());

    std::mt19937_64 rng(2026);
    std::normal_distribution<double> noise(0.0, 0.01);
    eotk::dynamics::TimeSeries noisy;
    noisy.time_s.resize(1601);
    noisy.value.resize(noisy.time_s.size());
    for (std::size_t i = 0; i < noisy.time_s.size(); ++i) {
      double t = 4.0e-3 * static_cast<double>(i) / (noisy.time_s.size() - 1);
      noisy.time_s[i] = t;
      noisy.value[i] = (1.0 * std::exp(-t / 450.0e-6) + 0.02) * (1.0 + noise(rng));
    }
    eotk::dynamics::write_time_series_csv(noisy, (dir / "decay_450us_noisy.csv").string());
    std::printf("wrote %s\n", (dir / "decay_450us_noisy.csv").string().c_str());

    ordered_json j;
    j["schema_version"] = 1;
    j["fit"] = {{"model", "exponential"}, {"data_csv", "data/decay_655us.csv"}};
    write_json(dir / "fit_decay.json", j);
  }

  // Pump-power sweep with the stray-light heating model enabled.
  {
    ordered_json j;
    j["schema_version"] = 1;
    j["device"] = table1_device();
    j["pump"] = {{"power_dbm", -16.0}, {"detuning_hz", -6.672e9}};
    j["superconductor"] = table2_superconductor();
    j["stray_light"] = {{"absorbed_fraction", 3.0e-3},
                        {"film_volume_um3", 2600.0},
                        {"base_density_um3", 25.0},
                        {"mw_alpha_k", 0.0516}};
    j["sweep"] = {{"target", "pump_power"}, {"start", -36.0}, {"stop", -6.0}, {"points", 31}};
    write_json(dir / "power_sweep.json", j);
  }

  return 0;
}

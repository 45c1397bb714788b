#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eotk/dynamics.hpp"
#include "eotk/eo_model.hpp"
#include "eotk/modes.hpp"
#include "eotk/resonator.hpp"

// JSON run configuration. Parsing is fail-closed: a `schema_version` field
// is required, unknown keys are errors, and every error message carries the
// dotted path of the offending field. User-facing values use explicit units
// in their key names (…_hz, …_um, …_dbm) and are converted to the library's
// SI/angular conventions exactly once, here.
namespace eotk::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DeviceBlock {
  quantities::DeviceParams device;    // angular rates, SI units
  double wavelength_nm = 0.0;         // optical carrier
  double tuning_pm_per_v = 0.0;       // 0 = not provided
  double g0_predicted_hz = 0.0;       // declared design prediction; 0 = absent
  double measured_efficiency = 0.0;   // 0 = not provided
  double input_chain_loss_db = 0.0;   // attenuation before the cavity input
};

struct PolymerBlock {
  eo::PolymerParams params;       // field_per_volt derived from the gap
  double electrode_gap_um = 0.0;
  double field_screening = 0.8;
};

struct SuperconductorBlock {
  quantities::SuperconductorParams params;
};

struct CpwBlock {
  resonator::CpwGeometry geometry;  // film filled from the superconductor block
  bool line_params_given = false;   // true when L'/C' came from the config
  double substrate_eps_eff = 0.0;   // used when they must be computed
};

struct SpiralBlock {
  resonator::SpiralGeometry geometry;
};

struct SlotBlock {
  resonator::SlotCircuit circuit;
  double resistivity_ohm_m = 0.0;
};

struct PumpBlock {
  double power_dbm = 0.0;
  double detuning_hz = 0.0;  // pump minus cavity, ordinary frequency
  eo::PumpConfig pump_config() const;
};

struct StrayLightBlock {
  double absorbed_fraction = 0.0;
  double film_volume_um3 = 0.0;
  double base_density_um3 = 0.0;
  double mw_alpha_k = 0.0;
};

struct SweepBlock {
  std::string target;  // pump_power | rf_detuning | pump_wavelength |
                       // temperature | optical_power | turns
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
};

struct FitBlock {
  std::string model;     // fano | exponential
  std::string data_csv;  // spectrum CSV (fano) or time-series CSV (exponential)
  std::string guess = "auto";  // auto | under_coupled | over_coupled | peak
  bool has_window = false;     // exponential only: restrict the fit window
  double window_lo_s = 0.0;
  double window_hi_s = 0.0;
};

struct CalibrateBlock {
  std::string signal_csv;
  std::string dark_csv;
  double window_lo_hz = 0.0;
  double window_hi_hz = 0.0;
  double rf_power_dbm = 0.0;
  double mw_frequency_hz = 0.0;
};

struct OptimizeVariable {
  std::string path;  // dotted parameter path, e.g. "device.impedance_ohm"
  double min = 0.0;
  double max = 0.0;
};

struct OptimizeBlock {
  std::string objective;  // max_eta | max_impedance_at_srf
  std::vector<OptimizeVariable> variables;
  int starts = 5;
  double srf_min_hz = 0.0;  // feasibility floor for max_impedance_at_srf
};

struct Config {
  std::optional<DeviceBlock> device;
  std::optional<PolymerBlock> polymer;
  std::optional<SuperconductorBlock> superconductor;
  std::optional<CpwBlock> cpw;
  std::optional<SpiralBlock> spiral;
  std::optional<SlotBlock> slot;
  std::optional<PumpBlock> pump;
  std::optional<StrayLightBlock> stray_light;
  std::optional<SweepBlock> sweep;
  std::optional<FitBlock> fit;
  std::optional<CalibrateBlock> calibrate;
  std::optional<OptimizeBlock> optimize;

  // Numeric parameter access by dotted path, used by the optimizer. Only
  // registered paths are legal; both throw ConfigError otherwise.
  double get(const std::string& path) const;
  void set(const std::string& path, double value);

  // Throws ConfigError when the named block is absent.
  const DeviceBlock& require_device() const;
  const PumpBlock& require_pump() const;
};

// Parses and validates a config file. Throws ConfigError with the dotted
// field path on any violation.
Config load_config(const std::string& path);

// The paths Config::get/set accept (each valid only when its block exists).
const std::vector<std::string>& registered_parameter_paths();

}  // namespace eotk::config

#include "eotk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include "json.hpp"

#include "eotk/constants.hpp"
#include "eotk/units.hpp"

namespace eotk::config {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Fail-closed view of one JSON object: the allowed key set is declared up
// front and any other key is an error carrying its dotted path.
class Block {
 public:
  Block(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j_.items()) {
      if (ok.count(item.key()) == 0) fail(path_ + "." + item.key(), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  double num(const char* key) const {
    require(key);
    return as_number(j_.at(key), path_ + "." + key);
  }

  double num_or(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), path_ + "." + key);
  }

  long long integer(const char* key) const {
    require(key);
    return as_integer(j_.at(key), path_ + "." + key);
  }

  long long integer_or(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    return as_integer(j_.at(key), path_ + "." + key);
  }

  std::string str(const char* key) const {
    require(key);
    const json& v = j_.at(key);
    if (!v.is_string()) fail(path_ + "." + key, "must be a string");
    return v.get<std::string>();
  }

  const json& child(const char* key) const {
    require(key);
    return j_.at(key);
  }

  const std::string& path() const { return path_; }

 private:
  void require(const char* key) const {
    if (!has(key)) fail(path_ + "." + key, "required key is missing");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    return v.get<double>();
  }

  static long long as_integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number()) {
      double d = v.get<double>();
      if (d == std::floor(d)) return static_cast<long long>(d);
    }
    fail(path, "must be an integer");
  }

  const json& j_;
  std::string path_;
};

// Redundant totals are accepted only when they agree with the parts.
void check_total(double total, double parts, const std::string& path, const char* formula) {
  double scale = std::max(std::abs(total), std::abs(parts));
  if (std::abs(total - parts) > 1e-6 * scale) {
    fail(path, "stated total does not match " + std::string(formula));
  }
}

DeviceBlock parse_device(const json& j, const std::string& path) {
  Block b(j, path,
          {"optical", "microwave", "impedance_ohm", "g0_hz", "tuning_pm_per_v",
           "g0_predicted_hz", "measured_efficiency", "input_chain_loss_db"});

  Block opt(b.child("optical"), path + ".optical",
            {"wavelength_nm", "kappa_i_hz", "kappa_e_hz", "kappa_tot_hz"});
  double wavelength_nm = opt.num("wavelength_nm");
  double kappa_i_hz = opt.num("kappa_i_hz");
  double kappa_e_hz = opt.num("kappa_e_hz");
  if (opt.has("kappa_tot_hz")) {
    check_total(opt.num("kappa_tot_hz"), kappa_i_hz + kappa_e_hz, path + ".optical",
                "kappa_i_hz + kappa_e_hz");
  }

  Block mw(b.child("microwave"), path + ".microwave",
           {"frequency_hz", "gamma_i_hz", "gamma_e_hz", "gamma_tot_hz"});
  double f_mw = mw.num("frequency_hz");
  double gamma_i_hz = mw.num("gamma_i_hz");
  double gamma_e_hz = mw.num("gamma_e_hz");
  if (mw.has("gamma_tot_hz")) {
    check_total(mw.num("gamma_tot_hz"), gamma_i_hz + 2.0 * gamma_e_hz, path + ".microwave",
                "gamma_i_hz + 2 * gamma_e_hz");
  }

  DeviceBlock out;
  out.wavelength_nm = wavelength_nm;
  out.tuning_pm_per_v = b.num_or("tuning_pm_per_v", 0.0);
  out.g0_predicted_hz = b.num_or("g0_predicted_hz", 0.0);
  out.measured_efficiency = b.num_or("measured_efficiency", 0.0);
  out.input_chain_loss_db = b.num_or("input_chain_loss_db", 0.0);
  try {
    using constants::two_pi;
    double omega_opt = two_pi * constants::c_light / (wavelength_nm * 1e-9);
    quantities::OpticalMode o(omega_opt, two_pi * kappa_i_hz, two_pi * kappa_e_hz);
    quantities::MicrowaveMode m(two_pi * f_mw, two_pi * gamma_i_hz, two_pi * gamma_e_hz);
    out.device = quantities::DeviceParams(o, m, b.num("impedance_ohm"),
                                          two_pi * b.num_or("g0_hz", 0.0));
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return out;
}

PolymerBlock parse_polymer(const json& j, const std::string& path) {
  Block b(j, path,
          {"r33_pm_per_v", "poling_efficiency", "n_e", "n_o", "mode_energy_fraction",
           "electrode_gap_um", "field_screening"});
  PolymerBlock out;
  out.electrode_gap_um = b.num("electrode_gap_um");
  out.field_screening = b.num_or("field_screening", 0.8);
  out.params.r33_film = b.num("r33_pm_per_v") * 1e-12;
  out.params.poling_efficiency = b.num("poling_efficiency");
  out.params.n_e = b.num("n_e");
  out.params.n_o = b.num("n_o");
  out.params.mode_energy_fraction = b.num("mode_energy_fraction");
  try {
    out.params.field_per_volt =
        eo::field_per_volt_parallel_plate(out.electrode_gap_um * 1e-6, out.field_screening);
    out.params.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return out;
}

SuperconductorBlock parse_superconductor(const json& j, const std::string& path) {
  Block b(j, path,
          {"sigma_n_s_per_m", "t_c_k", "delta0_uev", "n0_per_ev_um3", "thickness_nm",
           "tau0_ns", "debye_temperature_k", "ls_ref_fh_per_sq", "tau_qp_max_ms"});
  SuperconductorBlock out;
  try {
    out.params = quantities::SuperconductorParams(
        b.num("sigma_n_s_per_m"), b.num("t_c_k"),
        quantities::ev_to_joule(b.num("delta0_uev") * 1e-6),
        quantities::per_ev_per_um3_to_si(b.num("n0_per_ev_um3")), b.num("thickness_nm") * 1e-9,
        b.num("tau0_ns") * 1e-9, b.num_or("debye_temperature_k", 433.0),
        b.num_or("ls_ref_fh_per_sq", 0.0) * 1e-15, b.num_or("tau_qp_max_ms", 0.0) * 1e-3);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return out;
}

CpwBlock parse_cpw(const json& j, const std::string& path) {
  Block b(j, path,
          {"center_width_um", "gap_um", "length_um", "load_capacitance_ff", "l_per_m_nh",
           "c_per_m_pf", "substrate_eps_eff"});
  CpwBlock out;
  out.geometry.center_width = b.num("center_width_um") * 1e-6;
  out.geometry.gap = b.num("gap_um") * 1e-6;
  out.geometry.length = b.num("length_um") * 1e-6;
  out.geometry.load_capacitance = b.num("load_capacitance_ff") * 1e-15;
  bool has_l = b.has("l_per_m_nh");
  bool has_c = b.has("c_per_m_pf");
  if (has_l != has_c) {
    fail(path, "l_per_m_nh and c_per_m_pf must be given together");
  }
  if (has_l) {
    out.line_params_given = true;
    out.geometry.l_per_m = b.num("l_per_m_nh") * 1e-9;
    out.geometry.c_per_m = b.num("c_per_m_pf") * 1e-12;
    out.substrate_eps_eff = b.num_or("substrate_eps_eff", 0.0);
  } else {
    out.substrate_eps_eff = b.num("substrate_eps_eff");
    try {
      auto lp = resonator::cpw_line_params(out.geometry.center_width, out.geometry.gap,
                                           out.substrate_eps_eff);
      out.geometry.l_per_m = lp.l_per_m;
      out.geometry.c_per_m = lp.c_per_m;
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }
  return out;
}

SpiralBlock parse_spiral(const json& j, const std::string& path) {
  Block b(j, path,
          {"n_turns", "outer_diameter_um", "wire_pitch_um", "fill_factor",
           "cladding_permittivity"});
  SpiralBlock out;
  long long n = b.integer("n_turns");
  if (n < 1) fail(path + ".n_turns", "must be at least 1");
  out.geometry.n_turns = static_cast<int>(n);
  out.geometry.outer_diameter = b.num("outer_diameter_um") * 1e-6;
  out.geometry.wire_pitch = b.num("wire_pitch_um") * 1e-6;
  out.geometry.fill_factor = b.num("fill_factor");
  out.geometry.cladding_permittivity = b.num("cladding_permittivity");
  return out;
}

SlotBlock parse_slot(const json& j, const std::string& path) {
  Block b(j, path,
          {"slot_capacitance_ff", "electrode_capacitance_ff", "slab_length_per_area_per_m",
           "analysis_frequency_hz", "resistivity_ohm_cm"});
  SlotBlock out;
  out.circuit.slot_capacitance = b.num("slot_capacitance_ff") * 1e-15;
  out.circuit.electrode_capacitance = b.num("electrode_capacitance_ff") * 1e-15;
  out.circuit.slab_length_per_area = b.num("slab_length_per_area_per_m");
  out.circuit.analysis_frequency_hz = b.num("analysis_frequency_hz");
  out.resistivity_ohm_m = b.num("resistivity_ohm_cm") * 1e-2;
  return out;
}

PumpBlock parse_pump(const json& j, const std::string& path) {
  Block b(j, path, {"power_dbm", "detuning_hz"});
  PumpBlock out;
  out.power_dbm = b.num("power_dbm");
  out.detuning_hz = b.num("detuning_hz");
  return out;
}

StrayLightBlock parse_stray_light(const json& j, const std::string& path) {
  Block b(j, path, {"absorbed_fraction", "film_volume_um3", "base_density_um3", "mw_alpha_k"});
  StrayLightBlock out;
  out.absorbed_fraction = b.num("absorbed_fraction");
  out.film_volume_um3 = b.num("film_volume_um3");
  out.base_density_um3 = b.num_or("base_density_um3", 0.0);
  out.mw_alpha_k = b.num("mw_alpha_k");
  return out;
}

SweepBlock parse_sweep(const json& j, const std::string& path) {
  Block b(j, path, {"target", "start", "stop", "points"});
  SweepBlock out;
  out.target = b.str("target");
  static const std::set<std::string> kTargets = {"pump_power",    "rf_detuning",
                                                 "pump_wavelength", "temperature",
                                                 "optical_power", "turns"};
  if (kTargets.count(out.target) == 0) {
    fail(path + ".target", "unknown sweep target '" + out.target + "'");
  }
  out.start = b.num("start");
  out.stop = b.num("stop");
  long long points = b.integer("points");
  if (points < 1) fail(path + ".points", "grid must contain at least one point");
  out.points = static_cast<std::size_t>(points);
  return out;
}

FitBlock parse_fit(const json& j, const std::string& path) {
  Block b(j, path, {"model", "data_csv", "guess", "window_lo_s", "window_hi_s"});
  FitBlock out;
  out.model = b.str("model");
  if (out.model != "fano" && out.model != "exponential") {
    fail(path + ".model", "unknown fit model '" + out.model + "'");
  }
  out.data_csv = b.str("data_csv");
  if (b.has("guess")) {
    out.guess = b.str("guess");
    static const std::set<std::string> kGuesses = {"auto", "under_coupled", "over_coupled",
                                                   "peak"};
    if (kGuesses.count(out.guess) == 0) fail(path + ".guess", "unknown guess policy");
  }
  bool has_lo = b.has("window_lo_s");
  bool has_hi = b.has("window_hi_s");
  if (has_lo != has_hi) fail(path, "window_lo_s and window_hi_s must be given together");
  if (has_lo) {
    out.has_window = true;
    out.window_lo_s = b.num("window_lo_s");
    out.window_hi_s = b.num("window_hi_s");
    if (!(out.window_lo_s < out.window_hi_s)) {
      fail(path, "window_lo_s must be below window_hi_s");
    }
  }
  return out;
}

CalibrateBlock parse_calibrate(const json& j, const std::string& path) {
  Block b(j, path,
          {"signal_csv", "dark_csv", "window_lo_hz", "window_hi_hz", "rf_power_dbm",
           "mw_frequency_hz"});
  CalibrateBlock out;
  out.signal_csv = b.str("signal_csv");
  out.dark_csv = b.str("dark_csv");
  out.window_lo_hz = b.num("window_lo_hz");
  out.window_hi_hz = b.num("window_hi_hz");
  if (!(out.window_lo_hz < out.window_hi_hz)) {
    fail(path, "window_lo_hz must be below window_hi_hz");
  }
  out.rf_power_dbm = b.num("rf_power_dbm");
  out.mw_frequency_hz = b.num("mw_frequency_hz");
  if (out.mw_frequency_hz <= 0.0) fail(path + ".mw_frequency_hz", "must be positive");
  return out;
}

OptimizeBlock parse_optimize(const json& j, const std::string& path) {
  Block b(j, path, {"objective", "variables", "starts", "srf_min_hz"});
  OptimizeBlock out;
  out.objective = b.str("objective");
  if (out.objective != "max_eta" && out.objective != "max_impedance_at_srf") {
    fail(path + ".objective", "unknown objective '" + out.objective + "'");
  }
  long long starts = b.integer_or("starts", 5);
  if (starts < 1) fail(path + ".starts", "must be at least 1");
  out.starts = static_cast<int>(starts);
  out.srf_min_hz = b.num_or("srf_min_hz", 0.0);
  if (out.objective == "max_impedance_at_srf" && out.srf_min_hz <= 0.0) {
    fail(path + ".srf_min_hz", "required (> 0) for the max_impedance_at_srf objective");
  }

  const json& vars = b.child("variables");
  if (!vars.is_array() || vars.empty()) {
    fail(path + ".variables", "must be a non-empty array");
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::string vpath = path + ".variables[" + std::to_string(i) + "]";
    Block vb(vars.at(i), vpath, {"path", "min", "max"});
    OptimizeVariable v;
    v.path = vb.str("path");
    v.min = vb.num("min");
    v.max = vb.num("max");
    if (!(std::isfinite(v.min) && std::isfinite(v.max)) || !(v.min < v.max)) {
      fail(vpath, "search box must be finite with min < max");
    }
    const auto& known = registered_parameter_paths();
    if (std::find(known.begin(), known.end(), v.path) == known.end()) {
      fail(vpath + ".path", "'" + v.path + "' is not an adjustable parameter");
    }
    out.variables.push_back(std::move(v));
  }
  return out;
}

}  // namespace

eo::PumpConfig PumpBlock::pump_config() const {
  eo::PumpConfig p;
  p.power_w = quantities::dbm_to_watts(power_dbm);
  p.detuning = constants::two_pi * detuning_hz;
  return p;
}

const std::vector<std::string>& registered_parameter_paths() {
  static const std::vector<std::string> kPaths = {
      "device.impedance_ohm",    "pump.power_dbm",        "pump.detuning_hz",
      "spiral.n_turns",          "spiral.wire_pitch_um",  "spiral.outer_diameter_um",
      "spiral.fill_factor",      "slot.resistivity_ohm_cm", "polymer.poling_efficiency",
  };
  return kPaths;
}

double Config::get(const std::string& path) const {
  auto need = [&](bool present) {
    if (!present) throw ConfigError(path + ": block not present in this config");
  };
  if (path == "device.impedance_ohm") {
    need(device.has_value());
    return device->device.impedance_ohm;
  }
  if (path == "pump.power_dbm") {
    need(pump.has_value());
    return pump->power_dbm;
  }
  if (path == "pump.detuning_hz") {
    need(pump.has_value());
    return pump->detuning_hz;
  }
  if (path == "spiral.n_turns") {
    need(spiral.has_value());
    return static_cast<double>(spiral->geometry.n_turns);
  }
  if (path == "spiral.wire_pitch_um") {
    need(spiral.has_value());
    return spiral->geometry.wire_pitch * 1e6;
  }
  if (path == "spiral.outer_diameter_um") {
    need(spiral.has_value());
    return spiral->geometry.outer_diameter * 1e6;
  }
  if (path == "spiral.fill_factor") {
    need(spiral.has_value());
    return spiral->geometry.fill_factor;
  }
  if (path == "slot.resistivity_ohm_cm") {
    need(slot.has_value());
    return slot->resistivity_ohm_m * 1e2;
  }
  if (path == "polymer.poling_efficiency") {
    need(polymer.has_value());
    return polymer->params.poling_efficiency;
  }
  throw ConfigError(path + ": not an adjustable parameter");
}

void Config::set(const std::string& path, double value) {
  auto need = [&](bool present) {
    if (!present) throw ConfigError(path + ": block not present in this config");
  };
  if (path == "device.impedance_ohm") {
    need(device.has_value());
    device->device.impedance_ohm = value;
    return;
  }
  if (path == "pump.power_dbm") {
    need(pump.has_value());
    pump->power_dbm = value;
    return;
  }
  if (path == "pump.detuning_hz") {
    need(pump.has_value());
    pump->detuning_hz = value;
    return;
  }
  if (path == "spiral.n_turns") {
    need(spiral.has_value());
    spiral->geometry.n_turns = std::max(1, static_cast<int>(std::lround(value)));
    return;
  }
  if (path == "spiral.wire_pitch_um") {
    need(spiral.has_value());
    spiral->geometry.wire_pitch = value * 1e-6;
    return;
  }
  if (path == "spiral.outer_diameter_um") {
    need(spiral.has_value());
    spiral->geometry.outer_diameter = value * 1e-6;
    return;
  }
  if (path == "spiral.fill_factor") {
    need(spiral.has_value());
    spiral->geometry.fill_factor = value;
    return;
  }
  if (path == "slot.resistivity_ohm_cm") {
    need(slot.has_value());
    slot->resistivity_ohm_m = value * 1e-2;
    return;
  }
  if (path == "polymer.poling_efficiency") {
    need(polymer.has_value());
    polymer->params.poling_efficiency = value;
    return;
  }
  throw ConfigError(path + ": not an adjustable parameter");
}

const DeviceBlock& Config::require_device() const {
  if (!device) throw ConfigError("device: block required by this command");
  return *device;
}

const PumpBlock& Config::require_pump() const {
  if (!pump) throw ConfigError("pump: block required by this command");
  return *pump;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }

  Block top(j, "config",
            {"schema_version", "device", "polymer", "superconductor", "cpw", "spiral", "slot",
             "pump", "stray_light", "sweep", "fit", "calibrate", "optimize"});
  if (top.integer("schema_version") != 1) {
    fail("config.schema_version", "unsupported schema version (expected 1)");
  }

  Config cfg;
  if (top.has("device")) cfg.device = parse_device(top.child("device"), "device");
  if (top.has("polymer")) cfg.polymer = parse_polymer(top.child("polymer"), "polymer");
  if (top.has("superconductor")) {
    cfg.superconductor = parse_superconductor(top.child("superconductor"), "superconductor");
  }
  if (top.has("cpw")) cfg.cpw = parse_cpw(top.child("cpw"), "cpw");
  if (top.has("spiral")) cfg.spiral = parse_spiral(top.child("spiral"), "spiral");
  if (top.has("slot")) cfg.slot = parse_slot(top.child("slot"), "slot");
  if (top.has("pump")) cfg.pump = parse_pump(top.child("pump"), "pump");
  if (top.has("stray_light")) {
    cfg.stray_light = parse_stray_light(top.child("stray_light"), "stray_light");
  }
  if (top.has("sweep")) cfg.sweep = parse_sweep(top.child("sweep"), "sweep");
  if (top.has("fit")) cfg.fit = parse_fit(top.child("fit"), "fit");
  if (top.has("calibrate")) cfg.calibrate = parse_calibrate(top.child("calibrate"), "calibrate");
  if (top.has("optimize")) cfg.optimize = parse_optimize(top.child("optimize"), "optimize");

  if (cfg.cpw && cfg.superconductor) cfg.cpw->geometry.film = cfg.superconductor->params;

  if (cfg.optimize) {
    for (const auto& v : cfg.optimize->variables) {
      cfg.get(v.path);  // throws when the referenced block is absent
    }
  }
  return cfg;
}

}  // namespace eotk::config

#include "eotk/runners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "eotk/constants.hpp"
#include "eotk/dynamics.hpp"
#include "eotk/eo_model.hpp"
#include "eotk/numerics.hpp"
#include "eotk/parallel.hpp"
#include "eotk/resonator.hpp"
#include "eotk/spectra.hpp"
#include "eotk/superconductor.hpp"
#include "eotk/units.hpp"

namespace eotk::runners {
namespace {

using config::Config;
using config::ConfigError;
using nlohmann::ordered_json;
using constants::two_pi;

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return std::string(buf);
}

// Full-precision float for CSV cells; %.17g round-trips doubles exactly and
// is byte-stable run to run.
std::string cell(double v) { return fmt("%.17g", v); }

// Error text placed in a CSV cell must not break the row structure.
std::string csv_safe(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return msg;
}

std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = start;
    return g;
  }
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

double chain_loss_factor(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

// g0 actually used for efficiency predictions: the declared value when the
// config carries one, otherwise derived from the declared per-volt tuning.
double resolve_g0(const config::DeviceBlock& d, double* g_v_out, double* derived_out) {
  double g_v = 0.0;
  double derived = 0.0;
  if (d.tuning_pm_per_v > 0.0) {
    g_v = eo::gv_from_wavelength_tuning(d.tuning_pm_per_v * 1e-12, d.wavelength_nm * 1e-9);
    derived = eo::coupling_g0(
        g_v, eo::zero_point_voltage(d.device.microwave.omega, d.device.impedance_ohm));
  }
  if (g_v_out) *g_v_out = g_v;
  if (derived_out) *derived_out = derived;
  return d.device.g0 > 0.0 ? d.device.g0 : derived;
}

spectra::GuessPolicy guess_policy(const std::string& name) {
  if (name == "under_coupled") return spectra::GuessPolicy::kUnderCoupled;
  if (name == "over_coupled") return spectra::GuessPolicy::kOverCoupled;
  if (name == "peak") return spectra::GuessPolicy::kPeak;
  return spectra::GuessPolicy::kAuto;
}

std::string check_line(const std::string& what, bool pass, const std::string& detail) {
  return "check " + what + ": " + detail + " : " + (pass ? "PASS" : "FAIL");
}

// ---- sweep helpers ------------------------------------------------------

struct SweepTable {
  std::string header;              // comma-separated column names
  std::vector<std::string> rows;   // one CSV line each, no newline
};

std::string render_csv(const SweepTable& t) {
  std::string out = "# schema_version 1\n" + t.header + "\n";
  for (const auto& r : t.rows) {
    out += r;
    out += '\n';
  }
  return out;
}

// Runs `body(i)` for every row, catching model-range errors so the sweep
// continues. A failed row keeps its leading value column and carries the
// error text in the trailing error column, padded to the header width.
template <typename Body>
void fill_rows(SweepTable& t, const std::vector<double>& grid, Body body) {
  std::size_t columns = 1 + static_cast<std::size_t>(std::count(
                                t.header.begin(), t.header.end(), ','));
  t.rows.assign(grid.size(), std::string());
  parallel::parallel_for(parallel::ExecPolicy::kParallel,
                         static_cast<std::ptrdiff_t>(grid.size()), [&](std::ptrdiff_t i) {
                           auto idx = static_cast<std::size_t>(i);
                           try {
                             t.rows[idx] = body(idx);
                           } catch (const std::exception& e) {
                             std::string row = cell(grid[idx]);
                             for (std::size_t c = 2; c < columns; ++c) row += ",";
                             row += "," + csv_safe(e.what());
                             t.rows[idx] = row;
                           }
                         });
}

SweepTable sweep_pump_power(const Config& cfg, const std::vector<double>& grid_dbm) {
  const auto& d = cfg.require_device();
  const auto& pump = cfg.require_pump();
  double g0 = resolve_g0(d, nullptr, nullptr);
  if (g0 <= 0.0) {
    throw ConfigError("device: g0_hz or tuning_pm_per_v required for an efficiency sweep");
  }
  quantities::DeviceParams dev = d.device;
  dev.g0 = g0;
  double loss = chain_loss_factor(d.input_chain_loss_db);
  double detuning = two_pi * pump.detuning_hz;

  SweepTable t;
  t.header =
      "power_dbm,power_w_at_device,n_cav,qp_density_um3,gamma_tot_hz,cooperativity,"
      "efficiency,error";
  std::vector<double> powers_w(grid_dbm.size());
  for (std::size_t i = 0; i < grid_dbm.size(); ++i) {
    powers_w[i] = quantities::dbm_to_watts(grid_dbm[i]) * loss;
  }

  if (cfg.stray_light.has_value()) {
    if (!cfg.superconductor) {
      throw ConfigError("stray_light: superconductor block required for the heating model");
    }
    eo::StrayLightModel stray;
    stray.absorbed_fraction = cfg.stray_light->absorbed_fraction;
    stray.film_volume_um3 = cfg.stray_light->film_volume_um3;
    stray.base_density_um3 = cfg.stray_light->base_density_um3;
    stray.mw_alpha_k = cfg.stray_light->mw_alpha_k;
    stray.film = cfg.superconductor->params;
    auto pts = eo::efficiency_vs_pump_power(dev, powers_w, detuning, stray,
                                            parallel::ExecPolicy::kParallel);
    t.rows.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].error.empty()) {
        t.rows[i] = cell(grid_dbm[i]) + ",,,,,,," + csv_safe(pts[i].error);
        continue;
      }
      double coop = 4.0 * dev.g0 * dev.g0 * pts[i].n_cav /
                    (dev.optical.kappa_tot * pts[i].gamma_tot);
      t.rows[i] = cell(grid_dbm[i]) + "," + cell(pts[i].power_w) + "," + cell(pts[i].n_cav) +
                  "," + cell(pts[i].qp_density_um3) + "," +
                  cell(pts[i].gamma_tot / two_pi) + "," + cell(coop) + "," +
                  cell(pts[i].efficiency) + ",";
    }
    return t;
  }

  fill_rows(t, grid_dbm, [&](std::size_t i) {
    eo::PumpConfig pc{powers_w[i], detuning};
    double n_cav = eo::intracavity_photons(pc, dev.optical);
    auto cr = eo::conversion_efficiency(dev, n_cav);
    return cell(grid_dbm[i]) + "," + cell(powers_w[i]) + "," + cell(n_cav) + "," + cell(0.0) +
           "," + cell(dev.microwave.gamma_tot / two_pi) + "," + cell(cr.cooperativity) + "," +
           cell(cr.efficiency) + ",";
  });
  return t;
}

SweepTable sweep_rf_detuning(const Config& cfg, const std::vector<double>& grid_hz) {
  const auto& d = cfg.require_device();
  const auto& pump = cfg.require_pump();
  double g0 = resolve_g0(d, nullptr, nullptr);
  if (g0 <= 0.0) {
    throw ConfigError("device: g0_hz or tuning_pm_per_v required for an efficiency sweep");
  }
  quantities::DeviceParams dev = d.device;
  dev.g0 = g0;
  eo::PumpConfig pc = pump.pump_config();
  pc.power_w *= chain_loss_factor(d.input_chain_loss_db);
  double n_cav = eo::intracavity_photons(pc, dev.optical);

  std::vector<double> deltas_rad(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i) deltas_rad[i] = two_pi * grid_hz[i];
  auto eta = eo::efficiency_vs_rf_detuning(dev, n_cav, deltas_rad);

  SweepTable t;
  t.header = "rf_detuning_hz,efficiency,error";
  t.rows.resize(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    t.rows[i] = cell(grid_hz[i]) + "," + cell(eta[i]) + ",";
  }
  return t;
}

SweepTable sweep_pump_wavelength(const Config& cfg, const std::vector<double>& grid_nm) {
  const auto& d = cfg.require_device();
  const auto& o = d.device.optical;
  double omega_mw = d.device.microwave.omega;

  SweepTable t;
  t.header = "wavelength_nm,pump_detuning_hz,sideband_ratio_db,error";
  fill_rows(t, grid_nm, [&](std::size_t i) {
    double omega_p = two_pi * constants::c_light / (grid_nm[i] * 1e-9);
    double detuning = omega_p - o.omega;
    double ratio = eo::sideband_ratio_db(o, omega_mw, detuning);
    return cell(grid_nm[i]) + "," + cell(detuning / two_pi) + "," + cell(ratio) + ",";
  });
  return t;
}

// Kinetic fraction for film-response sweeps: prefer the CPW geometry when it
// can provide one, else the declared microwave kinetic fraction.
double resolve_alpha_k(const Config& cfg) {
  if (cfg.cpw && cfg.cpw->geometry.film.ls_ref > 0.0) {
    return resonator::cpw_kinetic_fraction(cfg.cpw->geometry).alpha_k;
  }
  if (cfg.stray_light) return cfg.stray_light->mw_alpha_k;
  throw ConfigError(
      "sweep: a cpw block (with superconductor ls_ref_fh_per_sq) or a stray_light block "
      "must provide the kinetic fraction");
}

SweepTable sweep_temperature(const Config& cfg, const std::vector<double>& grid_k) {
  if (!cfg.superconductor) throw ConfigError("superconductor: block required for this sweep");
  const auto& d = cfg.require_device();
  const auto& film = cfg.superconductor->params;
  double alpha_k = resolve_alpha_k(cfg);
  double f0_cold = d.device.microwave.f0_hz();
  sc::GapCache cache;

  SweepTable t;
  t.header = "temperature_k,n_qp_um3,tau_qp_s,f0_hz,q_qp,gamma_qp_hz,alpha_k,error";
  fill_rows(t, grid_k, [&](std::size_t i) {
    auto qp = sc::qp_density(film, grid_k[i], &cache);
    auto resp = sc::resonator_response(film, f0_cold, alpha_k, grid_k[i], &cache);
    return cell(grid_k[i]) + "," + cell(qp.density) + "," + cell(qp.lifetime) + "," +
           cell(resp.f0_hz) + "," + cell(resp.q_qp) + "," + cell(resp.gamma_qp / two_pi) +
           "," + cell(resp.alpha_k) + ",";
  });
  return t;
}

SweepTable sweep_optical_power(const Config& cfg, const std::vector<double>& grid_dbm) {
  const auto& d = cfg.require_device();
  const auto& pump = cfg.require_pump();
  if (!cfg.superconductor) throw ConfigError("superconductor: block required for this sweep");
  if (!cfg.stray_light) throw ConfigError("stray_light: block required for this sweep");
  const auto& film = cfg.superconductor->params;
  const auto& stray = *cfg.stray_light;

  double g0 = resolve_g0(d, nullptr, nullptr);
  quantities::DeviceParams dev = d.device;
  dev.g0 = g0 > 0.0 ? g0 : dev.g0;
  double loss = chain_loss_factor(d.input_chain_loss_db);
  double detuning = two_pi * pump.detuning_hz;
  double f0_cold = d.device.microwave.f0_hz();

  eo::StrayLightModel model;
  model.absorbed_fraction = stray.absorbed_fraction;
  model.film_volume_um3 = stray.film_volume_um3;
  model.base_density_um3 = stray.base_density_um3;
  model.mw_alpha_k = stray.mw_alpha_k;
  model.film = film;

  std::vector<double> powers_w(grid_dbm.size());
  for (std::size_t i = 0; i < grid_dbm.size(); ++i) {
    powers_w[i] = quantities::dbm_to_watts(grid_dbm[i]) * loss;
  }
  auto pts = eo::efficiency_vs_pump_power(dev, powers_w, detuning, model,
                                          parallel::ExecPolicy::kParallel);
  sc::GapCache cache;

  SweepTable t;
  t.header = "power_dbm,power_w_at_device,qp_density_um3,temperature_k,f0_hz,q_tot,error";
  fill_rows(t, grid_dbm, [&](std::size_t i) {
    if (!pts[i].error.empty()) throw std::runtime_error(pts[i].error);
    auto state = sc::qp_temperature(film, pts[i].qp_density_um3, &cache);
    auto resp = sc::resonator_response(film, f0_cold, stray.mw_alpha_k, state.temperature,
                                       &cache);
    double kappa_tot_hz = pts[i].gamma_tot / two_pi;
    double q_tot = resp.f0_hz / kappa_tot_hz;
    return cell(grid_dbm[i]) + "," + cell(pts[i].power_w) + "," +
           cell(pts[i].qp_density_um3) + "," + cell(state.temperature) + "," +
           cell(resp.f0_hz) + "," + cell(q_tot) + ",";
  });
  return t;
}

SweepTable sweep_turns(const Config& cfg, const std::vector<double>& grid) {
  if (!cfg.spiral) throw ConfigError("spiral: block required for this sweep");
  const auto base = cfg.spiral->geometry;

  SweepTable t;
  t.header = "n_turns,inductance_h,c_self_f,srf_hz,impedance_ohm,error";
  fill_rows(t, grid, [&](std::size_t i) {
    auto g = base;
    g.n_turns = std::max(1, static_cast<int>(std::lround(grid[i])));
    auto r = resonator::spiral_resonance(g);
    return std::to_string(g.n_turns) + "," + cell(r.inductance) + "," + cell(r.c_self) + "," +
           cell(r.srf_hz) + "," + cell(r.impedance) + ",";
  });
  return t;
}

// ---- optimize helpers ---------------------------------------------------

struct DescentResult {
  std::vector<double> params;
  double value = -std::numeric_limits<double>::infinity();
};

double eval_objective(const Config& base, const config::OptimizeBlock& opt,
                      const std::vector<double>& x) {
  Config work = base;
  try {
    for (std::size_t i = 0; i < opt.variables.size(); ++i) {
      work.set(opt.variables[i].path, x[i]);
    }
    if (opt.objective == "max_eta") {
      const auto& d = work.require_device();
      double g0 = resolve_g0(d, nullptr, nullptr);
      if (g0 <= 0.0) {
        throw ConfigError("device: g0_hz or tuning_pm_per_v required for max_eta");
      }
      quantities::DeviceParams dev = d.device;
      dev.g0 = g0;
      eo::PumpConfig pc = work.require_pump().pump_config();
      pc.power_w *= chain_loss_factor(d.input_chain_loss_db);
      double n_cav = eo::intracavity_photons(pc, dev.optical);
      return eo::conversion_efficiency(dev, n_cav).efficiency;
    }
    // max_impedance_at_srf: impedance when the self-resonance clears the
    // floor, else a negative value that grows toward feasibility so the
    // line searches are guided to the boundary.
    auto r = resonator::spiral_resonance(work.spiral->geometry);
    if (r.srf_hz >= opt.srf_min_hz) return r.impedance;
    return -1e3 * (1.0 + (opt.srf_min_hz - r.srf_hz) / opt.srf_min_hz);
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
}

DescentResult coordinate_descent(const Config& base, const config::OptimizeBlock& opt,
                                 std::vector<double> x) {
  auto value_at = [&](const std::vector<double>& p) { return eval_objective(base, opt, p); };
  DescentResult out;
  out.value = value_at(x);
  const int max_passes = 60;
  for (int pass = 0; pass < max_passes; ++pass) {
    double before = out.value;
    for (std::size_t i = 0; i < opt.variables.size(); ++i) {
      const auto& v = opt.variables[i];
      if (v.path == "spiral.n_turns") {
        // Integer coordinate: exhaustive scan of the box is exact and cheap.
        int lo = static_cast<int>(std::ceil(v.min));
        int hi = static_cast<int>(std::floor(v.max));
        double best_val = out.value;
        double best_x = x[i];
        for (int n = lo; n <= hi; ++n) {
          auto trial = x;
          trial[i] = static_cast<double>(n);
          double val = value_at(trial);
          if (val > best_val) {
            best_val = val;
            best_x = trial[i];
          }
        }
        x[i] = best_x;
        out.value = best_val;
      } else {
        double xi = numerics::minimize_golden(
            [&](double c) {
              auto trial = x;
              trial[i] = c;
              return -value_at(trial);
            },
            v.min, v.max, 1e-10);
        auto trial = x;
        trial[i] = xi;
        double val = value_at(trial);
        if (val > out.value) {
          x[i] = xi;
          out.value = val;
        }
      }
    }
    if (!(out.value > before + 1e-12 * std::max(1.0, std::abs(before)))) break;
  }
  out.params = std::move(x);
  return out;
}

ordered_json params_json(const config::OptimizeBlock& opt, const std::vector<double>& x) {
  ordered_json p = ordered_json::object();
  for (std::size_t i = 0; i < opt.variables.size(); ++i) {
    if (opt.variables[i].path == "spiral.n_turns") {
      p[opt.variables[i].path] = static_cast<long long>(std::lround(x[i]));
    } else {
      p[opt.variables[i].path] = x[i];
    }
  }
  return p;
}

}  // namespace

OperatingPoint operating_point(const Config& cfg) {
  const auto& d = cfg.require_device();
  OperatingPoint op;
  op.g0_used = resolve_g0(d, &op.g_v, &op.g0_derived);
  op.v_zpf = eo::zero_point_voltage(d.device.microwave.omega, d.device.impedance_ohm);
  if (!cfg.pump) return op;

  op.has_pump = true;
  eo::PumpConfig pc = cfg.pump->pump_config();
  pc.power_w *= chain_loss_factor(d.input_chain_loss_db);
  op.power_at_device_w = pc.power_w;
  op.n_cav = eo::intracavity_photons(pc, d.device.optical);
  quantities::DeviceParams dev = d.device;
  dev.g0 = op.g0_used;
  auto cr = eo::conversion_efficiency(dev, op.n_cav);
  op.cooperativity = cr.cooperativity;
  op.efficiency = cr.efficiency;
  op.bandwidth_fwhm_hz = cr.bandwidth_fwhm_hz;
  op.sideband_ratio_db =
      eo::sideband_ratio_db(d.device.optical, d.device.microwave.omega, pc.detuning);
  return op;
}

RunResult run_report(const Config& cfg) {
  RunResult res;
  const auto& d = cfg.require_device();
  const auto& o = d.device.optical;
  const auto& m = d.device.microwave;
  OperatingPoint op = operating_point(cfg);

  std::string out;
  out += "# device summary (schema_version 1)\n";
  out += "[optical]\n";
  out += fmt("wavelength_nm         = %.6f\n", d.wavelength_nm);
  out += fmt("f0_hz                 = %.10e\n", o.f0_hz());
  out += fmt("kappa_i_hz            = %.10e\n", o.kappa_i / two_pi);
  out += fmt("kappa_e_hz            = %.10e\n", o.kappa_e / two_pi);
  out += fmt("kappa_tot_hz          = %.10e\n", o.kappa_tot / two_pi);
  out += fmt("q_i                   = %.6e\n", o.omega / o.kappa_i);
  out += fmt("q_e                   = %.6e\n", o.omega / o.kappa_e);
  out += fmt("q_tot                 = %.6e\n", o.q_total());
  out += "[microwave]\n";
  out += fmt("f0_hz                 = %.10e\n", m.f0_hz());
  out += fmt("gamma_i_hz            = %.10e\n", m.gamma_i / two_pi);
  out += fmt("gamma_e_hz            = %.10e (per port)\n", m.gamma_e / two_pi);
  out += fmt("gamma_tot_hz          = %.10e\n", m.gamma_tot / two_pi);
  out += fmt("impedance_ohm         = %.6f\n", d.device.impedance_ohm);
  out += "[derived]\n";
  out += fmt("v_zpf_v               = %.10e\n", op.v_zpf);
  if (d.tuning_pm_per_v > 0.0) {
    out += fmt("tuning_pm_per_v       = %.6f\n", d.tuning_pm_per_v);
    out += fmt("g_v_hz_per_v          = %.10e\n", op.g_v / two_pi);
    out += fmt("g0_predicted_hz       = %.10e\n", op.g0_derived / two_pi);
  }
  if (d.device.g0 > 0.0) {
    out += fmt("g0_hz                 = %.10e (declared)\n", d.device.g0 / two_pi);
  }
  if (op.has_pump) {
    out += "[operating_point]\n";
    out += fmt("pump_power_dbm        = %.6f\n", cfg.pump->power_dbm);
    out += fmt("pump_detuning_hz      = %.10e\n", cfg.pump->detuning_hz);
    out += fmt("power_at_device_w     = %.10e\n", op.power_at_device_w);
    out += fmt("n_cav                 = %.10e\n", op.n_cav);
    out += fmt("cooperativity         = %.10e\n", op.cooperativity);
    out += fmt("efficiency            = %.10e\n", op.efficiency);
    out += fmt("bandwidth_fwhm_hz     = %.10e\n", op.bandwidth_fwhm_hz);
    out += fmt("sideband_ratio_db     = %.6f\n", op.sideband_ratio_db);
  }

  out += "[checks]\n";
  {
    double sum = (o.kappa_i + o.kappa_e) / two_pi;
    double tot = o.kappa_tot / two_pi;
    bool pass = std::abs(sum - tot) <= 1e-9 * std::max(std::abs(tot), 1.0);
    out += check_line("optical rate composition", pass,
                      fmt("kappa_i_hz + kappa_e_hz = %.6e vs kappa_tot_hz = %.6e", sum, tot)) +
           "\n";
  }
  {
    double sum = (m.gamma_i + 2.0 * m.gamma_e) / two_pi;
    double tot = m.gamma_tot / two_pi;
    bool pass = std::abs(sum - tot) <= 1e-9 * std::max(std::abs(tot), 1.0);
    out += check_line(
               "microwave rate composition", pass,
               fmt("gamma_i_hz + 2*gamma_e_hz = %.6e vs gamma_tot_hz = %.6e", sum, tot)) +
           "\n";
  }
  if (d.g0_predicted_hz > 0.0 && d.tuning_pm_per_v > 0.0) {
    double predicted = op.g0_derived / two_pi;
    bool pass = std::abs(predicted - d.g0_predicted_hz) <= 0.05 * d.g0_predicted_hz;
    out += check_line("predicted coupling rate", pass,
                      fmt("g0_predicted_hz = %.6e vs declared %.6e (tolerance 5%%)", predicted,
                          d.g0_predicted_hz)) +
           "\n";
  }
  if (d.measured_efficiency > 0.0 && op.has_pump && op.n_cav > 0.0) {
    double g0_inferred = eo::infer_g0(d.measured_efficiency, d.device, op.n_cav);
    out += fmt("g0_inferred_hz        = %.10e\n", g0_inferred / two_pi);
    if (d.device.g0 > 0.0) {
      bool pass = std::abs(g0_inferred - d.device.g0) <= 0.10 * d.device.g0;
      out += check_line("inferred coupling rate", pass,
                        fmt("g0_inferred_hz = %.6e vs declared %.6e (tolerance 10%%)",
                            g0_inferred / two_pi, d.device.g0 / two_pi)) +
             "\n";
    }
  }

  res.output = out;
  return res;
}

RunResult run_sweep(const Config& cfg) {
  RunResult res;
  if (!cfg.sweep) throw ConfigError("sweep: block required by this command");
  const auto& sw = *cfg.sweep;
  auto grid = linear_grid(sw.start, sw.stop, sw.points);

  SweepTable t;
  if (sw.target == "pump_power") {
    t = sweep_pump_power(cfg, grid);
  } else if (sw.target == "rf_detuning") {
    t = sweep_rf_detuning(cfg, grid);
  } else if (sw.target == "pump_wavelength") {
    t = sweep_pump_wavelength(cfg, grid);
  } else if (sw.target == "temperature") {
    t = sweep_temperature(cfg, grid);
  } else if (sw.target == "optical_power") {
    t = sweep_optical_power(cfg, grid);
  } else {
    t = sweep_turns(cfg, grid);
  }
  res.output = render_csv(t);
  return res;
}

RunResult run_fit(const Config& cfg) {
  RunResult res;
  if (!cfg.fit) throw ConfigError("fit: block required by this command");
  const auto& fb = *cfg.fit;
  ordered_json j;
  j["schema_version"] = 1;
  j["model"] = fb.model;
  j["data_csv"] = fb.data_csv;

  bool flagged = false;
  if (fb.model == "fano") {
    spectra::Spectrum s = spectra::read_spectrum_csv(fb.data_csv);
    auto fit = spectra::fit_lineshape(s, guess_policy(fb.guess));
    flagged = fit.flagged;
    j["n_points"] = s.frequency_hz.size();
    j["converged"] = fit.converged;
    j["flagged"] = fit.flagged;
    ordered_json p;
    p["f0_hz"] = fit.model.f0_hz;
    p["kappa_i_hz"] = fit.model.kappa_i_hz;
    p["kappa_e_hz"] = fit.model.kappa_e_hz;
    p["kappa_tot_hz"] = fit.model.kappa_tot_hz();
    p["q_i"] = fit.model.f0_hz / fit.model.kappa_i_hz;
    p["q_e"] = fit.model.f0_hz / fit.model.kappa_e_hz;
    p["q_tot"] = fit.model.f0_hz / fit.model.kappa_tot_hz();
    p["fano_phase_rad"] = fit.model.fano_phase;
    p["scale"] = fit.model.scale;
    p["bg_slope_per_hz"] = fit.model.bg_slope;
    p["bg_intercept"] = fit.model.bg_intercept;
    j["parameters"] = p;
    ordered_json e;
    e["f0_hz"] = fit.errors.f0_hz;
    e["kappa_i_hz"] = fit.errors.kappa_i_hz;
    e["kappa_e_hz"] = fit.errors.kappa_e_hz;
    e["fano_phase_rad"] = fit.errors.fano_phase;
    e["scale"] = fit.errors.scale;
    e["bg_slope_per_hz"] = fit.errors.bg_slope;
    e["bg_intercept"] = fit.errors.bg_intercept;
    j["standard_errors"] = e;
    j["residual_norm"] = std::sqrt(fit.cost);
  } else {
    dynamics::TimeSeries ts = dynamics::read_time_series_csv(fb.data_csv);
    double lo = fb.has_window ? fb.window_lo_s : ts.time_s.front();
    double hi = fb.has_window ? fb.window_hi_s : ts.time_s.back();
    auto fit = dynamics::fit_exponential(ts, lo, hi);
    flagged = fit.flagged;
    j["n_points"] = ts.time_s.size();
    j["window_lo_s"] = lo;
    j["window_hi_s"] = hi;
    j["converged"] = fit.converged;
    j["flagged"] = fit.flagged;
    ordered_json p;
    p["amplitude"] = fit.amplitude;
    p["tau_s"] = fit.tau_s;
    p["offset"] = fit.offset;
    j["parameters"] = p;
    ordered_json e;
    e["amplitude"] = fit.amplitude_err;
    e["tau_s"] = fit.tau_err;
    e["offset"] = fit.offset_err;
    j["standard_errors"] = e;
    j["residual_norm"] = std::sqrt(fit.cost);
  }

  res.output = j.dump(2) + "\n";
  if (flagged) {
    res.exit_code = 3;
    res.error = "fit flagged: not converged or pinned at a parameter bound";
  }
  return res;
}

RunResult run_calibrate(const Config& cfg) {
  RunResult res;
  if (!cfg.calibrate) throw ConfigError("calibrate: block required by this command");
  const auto& cb = *cfg.calibrate;
  spectra::Spectrum signal = spectra::read_spectrum_csv(cb.signal_csv);
  spectra::Spectrum dark = spectra::read_spectrum_csv(cb.dark_csv);
  auto cal = spectra::calibrate_efficiency(signal, dark, cb.window_lo_hz, cb.window_hi_hz,
                                           quantities::dbm_to_watts(cb.rf_power_dbm),
                                           two_pi * cb.mw_frequency_hz);
  ordered_json j;
  j["schema_version"] = 1;
  j["signal_csv"] = cb.signal_csv;
  j["dark_csv"] = cb.dark_csv;
  j["window_lo_hz"] = cal.window_lo_hz;
  j["window_hi_hz"] = cal.window_hi_hz;
  j["rf_power_dbm"] = cb.rf_power_dbm;
  j["mw_frequency_hz"] = cb.mw_frequency_hz;
  j["shot_psd_w_per_hz"] = cal.shot_psd;
  j["sideband_flux_per_s"] = cal.sideband_flux;
  j["incident_flux_per_s"] = cal.incident_flux;
  j["efficiency"] = cal.efficiency;
  j["efficiency_err"] = cal.efficiency_err;
  j["consistent_with_zero"] = cal.consistent_with_zero;
  res.output = j.dump(2) + "\n";
  return res;
}

RunResult run_optimize(const Config& cfg, std::uint64_t seed) {
  RunResult res;
  if (!cfg.optimize) throw ConfigError("optimize: block required by this command");
  const auto& opt = *cfg.optimize;
  const std::size_t nv = opt.variables.size();

  // Start 0 is the box center; the rest are uniform draws from one seeded
  // generator, taken in a fixed order so runs are reproducible.
  std::vector<std::vector<double>> starts;
  std::vector<double> center(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    center[i] = 0.5 * (opt.variables[i].min + opt.variables[i].max);
  }
  starts.push_back(center);
  std::mt19937_64 rng(seed);
  for (int k = 1; k < opt.starts; ++k) {
    std::vector<double> x(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1), portable
      x[i] = opt.variables[i].min + u * (opt.variables[i].max - opt.variables[i].min);
    }
    starts.push_back(std::move(x));
  }
  for (auto& s : starts) {
    for (std::size_t i = 0; i < nv; ++i) {
      if (opt.variables[i].path == "spiral.n_turns") s[i] = std::lround(s[i]);
    }
  }

  std::vector<DescentResult> results(starts.size());
  parallel::parallel_for(parallel::ExecPolicy::kParallel,
                         static_cast<std::ptrdiff_t>(starts.size()), [&](std::ptrdiff_t k) {
                           results[static_cast<std::size_t>(k)] =
                               coordinate_descent(cfg, opt, starts[static_cast<std::size_t>(k)]);
                         });

  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].value > results[best].value) best = k;
  }

  ordered_json j;
  j["schema_version"] = 1;
  j["objective"] = opt.objective;
  j["seed"] = seed;
  j["starts"] = opt.starts;
  ordered_json bestj;
  bestj["objective_value"] = results[best].value;
  bestj["parameters"] = params_json(opt, results[best].params);

  // Model detail at the optimum.
  Config tuned = cfg;
  for (std::size_t i = 0; i < nv; ++i) {
    tuned.set(opt.variables[i].path, results[best].params[i]);
  }
  ordered_json detail;
  if (opt.objective == "max_eta") {
    OperatingPoint op = operating_point(tuned);
    detail["v_zpf_v"] = op.v_zpf;
    detail["g0_hz"] = op.g0_used / two_pi;
    detail["n_cav"] = op.n_cav;
    detail["cooperativity"] = op.cooperativity;
    detail["efficiency"] = op.efficiency;
    detail["bandwidth_fwhm_hz"] = op.bandwidth_fwhm_hz;
  } else {
    auto r = resonator::spiral_resonance(tuned.spiral->geometry);
    detail["inductance_h"] = r.inductance;
    detail["c_self_f"] = r.c_self;
    detail["srf_hz"] = r.srf_hz;
    detail["impedance_ohm"] = r.impedance;
    detail["srf_min_hz"] = opt.srf_min_hz;
  }
  bestj["details"] = detail;
  j["best"] = bestj;

  ordered_json summary = ordered_json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    ordered_json s;
    s["index"] = k;
    s["objective_value"] = results[k].value;
    s["parameters"] = params_json(opt, results[k].params);
    summary.push_back(s);
  }
  j["starts_summary"] = summary;

  res.output = j.dump(2) + "\n";
  return res;
}

}  // namespace eotk::runners

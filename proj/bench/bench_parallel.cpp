// Benchmark of the OpenMP-parallel kernels against their serial reference
// paths. Every kernel must produce bitwise-identical results under both
// policies (deterministic index-ordered reductions), so besides timing this
// doubles as an equivalence check; any mismatch fails the run.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "eotk/constants.hpp"
#include "eotk/dynamics.hpp"
#include "eotk/eo_model.hpp"
#include "eotk/modes.hpp"
#include "eotk/parallel.hpp"
#include "eotk/spectra.hpp"

namespace {

using eotk::parallel::ExecPolicy;
using eotk::constants::two_pi;

double now_ms() {
  auto t = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration<double, std::milli>(t).count();
}

int g_failures = 0;

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bitwise-identical" : "MISMATCH");
  if (!identical) ++g_failures;
}

eotk::eo::FieldGrid make_grid(std::size_t nx, std::size_t ny) {
  eotk::eo::FieldGrid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = 20e-9;
  g.dy = 20e-9;
  std::size_t n = nx * ny;
  g.ex.resize(n);
  g.ey.resize(n);
  g.ez.resize(n);
  g.eps.resize(n);
  g.delta_eps.resize(n);
  g.polymer_mask.resize(n);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      std::size_t i = iy * nx + ix;
      double x = (static_cast<double>(ix) / nx - 0.5) * 4.0;
      double y = (static_cast<double>(iy) / ny - 0.5) * 4.0;
      double amp = std::exp(-(x * x + y * y));
      g.ex[i] = {0.1 * amp, 0.02 * amp};
      g.ey[i] = {0.05 * amp, 0.0};
      g.ez[i] = {amp, 0.3 * amp};
      bool polymer = std::abs(y) < 0.6;
      g.polymer_mask[i] = polymer ? 1 : 0;
      double n2 = polymer ? 1.70 * 1.70 : 2.10;
      g.eps[i] = {n2, n2, n2};
      g.delta_eps[i] = polymer ? eotk::eo::Tensor3{1e-7, 1e-7, 4e-7} : eotk::eo::Tensor3{};
    }
  }
  return g;
}

void bench_field_reduction() {
  auto grid = make_grid(1024, 1024);
  double omega = two_pi * eotk::constants::c_light / 1557.92e-9;
  double t0 = now_ms();
  double serial = eotk::eo::tuning_rate_from_fields(grid, 1.0, omega, ExecPolicy::kSerial);
  double t1 = now_ms();
  double par = eotk::eo::tuning_rate_from_fields(grid, 1.0, omega, ExecPolicy::kParallel);
  double t2 = now_ms();
  report("field-grid tuning rate", t1 - t0, t2 - t1, serial == par);
}

void bench_batch_fits() {
  std::vector<eotk::spectra::Spectrum> spectra;
  std::vector<double> f(1201);
  for (std::size_t k = 0; k < 64; ++k) {
    eotk::spectra::FanoLorentzian m;
    m.f0_hz = 6.0e9 + 1e6 * static_cast<double>(k);
    m.kappa_i_hz = 2.5e6 + 1e4 * static_cast<double>(k % 7);
    m.kappa_e_hz = 3.8e6 + 1e4 * static_cast<double>(k % 5);
    m.fano_phase = 0.3 * std::sin(0.7 * static_cast<double>(k) + 0.4);
    m.scale = 1.0;
    m.bg_intercept = 0.05;
    double span = 30.0 * m.kappa_tot_hz();
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = m.f0_hz - 0.5 * span + span * static_cast<double>(i) / (f.size() - 1);
    }
    spectra.push_back(
        eotk::spectra::eval_lineshape(m, f, 0.0, eotk::spectra::SpectrumKind::kMicrowaveS21));
  }
  double t0 = now_ms();
  auto serial = eotk::spectra::fit_lineshape_batch(spectra, eotk::spectra::GuessPolicy::kAuto,
                                                   ExecPolicy::kSerial);
  double t1 = now_ms();
  auto par = eotk::spectra::fit_lineshape_batch(spectra, eotk::spectra::GuessPolicy::kAuto,
                                                ExecPolicy::kParallel);
  double t2 = now_ms();
  bool same = serial.size() == par.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i) {
    same = serial[i].model.f0_hz == par[i].model.f0_hz &&
           serial[i].model.kappa_i_hz == par[i].model.kappa_i_hz &&
           serial[i].model.kappa_e_hz == par[i].model.kappa_e_hz &&
           serial[i].model.fano_phase == par[i].model.fano_phase &&
           serial[i].cost == par[i].cost;
  }
  report("lineshape batch fit (64)", t1 - t0, t2 - t1, same);
}

void bench_power_sweep() {
  using namespace eotk::quantities;
  OpticalMode o(two_pi * eotk::constants::c_light / 1557.92e-9, two_pi * 2.07e9,
                two_pi * 7.61e9);
  MicrowaveMode m(two_pi * 6.672e9, two_pi * 2.53e6, two_pi * 1.91e6);
  DeviceParams dev(o, m, 100.0, two_pi * 330.0);
  SuperconductorParams film(1.3e8, 1.1, ev_to_joule(167e-6), per_ev_per_um3_to_si(1.72e10),
                            100e-9, 458e-9, 433.0, 140e-15);
  eotk::eo::StrayLightModel stray;
  stray.absorbed_fraction = 3e-3;
  stray.film_volume_um3 = 2600.0;
  stray.base_density_um3 = 25.0;
  stray.mw_alpha_k = 0.0516;
  stray.film = film;
  std::vector<double> powers(24);
  for (std::size_t i = 0; i < powers.size(); ++i) {
    powers[i] = 1e-3 * std::pow(10.0, (-36.0 + 30.0 * static_cast<double>(i) / 23.0) / 10.0);
  }
  double detuning = -m.omega;
  double t0 = now_ms();
  auto serial =
      eotk::eo::efficiency_vs_pump_power(dev, powers, detuning, stray, ExecPolicy::kSerial);
  double t1 = now_ms();
  auto par =
      eotk::eo::efficiency_vs_pump_power(dev, powers, detuning, stray, ExecPolicy::kParallel);
  double t2 = now_ms();
  bool same = serial.size() == par.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i) {
    same = serial[i].efficiency == par[i].efficiency &&
           serial[i].qp_density_um3 == par[i].qp_density_um3 &&
           serial[i].gamma_tot == par[i].gamma_tot;
  }
  report("heated power sweep (24)", t1 - t0, t2 - t1, same);
}

void bench_time_resolved() {
  using namespace eotk::quantities;
  SuperconductorParams film(1.3e8, 1.1, ev_to_joule(167e-6), per_ev_per_um3_to_si(1.72e10),
                            100e-9, 458e-9, 433.0, 140e-15);
  eotk::dynamics::RateModel model;
  model.generation_rate = 2.0e10;
  model.background_generation = 1.0e5;
  model.recombination_k = 0.1202728;
  model.bath_weight = 0.0;
  eotk::dynamics::PulseSchedule sched;
  sched.period = 200e-6;
  sched.on_duration = 100e-6;
  sched.optical_power_on = 1.0;
  sched.absorbed_fraction = 1.0;
  sched.switch_rise_time = 1e-6;
  eotk::dynamics::ResonatorState state;
  state.film = film;
  state.f0_cold_hz = 6.672e9;
  state.alpha_k = 0.0516;
  state.kappa_e_hz = 3.82e6;
  state.kappa_i_other_hz = 2.0e6;
  std::vector<double> probe(161);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    probe[i] = 6.64e9 + 4e7 * static_cast<double>(i) / (probe.size() - 1);
  }
  std::vector<double> t_out(48);
  for (std::size_t i = 0; i < t_out.size(); ++i) {
    t_out[i] = sched.period * static_cast<double>(i) / static_cast<double>(t_out.size());
  }
  double t0 = now_ms();
  auto serial = eotk::dynamics::time_resolved_spectrum(model, sched, state, probe, t_out, 0.0,
                                                       ExecPolicy::kSerial);
  double t1 = now_ms();
  auto par = eotk::dynamics::time_resolved_spectrum(model, sched, state, probe, t_out, 0.0,
                                                    ExecPolicy::kParallel);
  double t2 = now_ms();
  bool same = serial.s21.size() == par.s21.size();
  for (std::size_t i = 0; same && i < serial.s21.size(); ++i) same = serial.s21[i] == par.s21[i];
  for (std::size_t i = 0; same && i < serial.f0_hz.size(); ++i) {
    same = serial.f0_hz[i] == par.f0_hz[i];
  }
  report("time-resolved spectrum", t1 - t0, t2 - t1, same);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", eotk::parallel::hardware_threads());
  bench_field_reduction();
  bench_batch_fits();
  bench_power_sweep();
  bench_time_resolved();
  if (g_failures != 0) {
    std::printf("FAILED: %d kernel(s) diverged between serial and parallel\n", g_failures);
    return 1;
  }
  std::printf("all kernels bitwise-identical across policies\n");
  return 0;
}

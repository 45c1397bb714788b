// Determinism contract of the parallel execution layer: every parallel
// kernel must produce results bitwise identical to its serial reference on
// the same inputs, because reductions materialize one partial per index and
// accumulate in a fixed order. All comparisons here use exact floating-point
// equality on purpose.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "eotk/constants.hpp"
#include "eotk/dynamics.hpp"
#include "eotk/eo_model.hpp"
#include "eotk/modes.hpp"
#include "eotk/parallel.hpp"
#include "eotk/spectra.hpp"
#include "eotk/superconductor.hpp"
#include "eotk/units.hpp"
#include "oracles.hpp"

using namespace eotk;
using oracles::linspace;
using parallel::ExecPolicy;

namespace {

quantities::OpticalMode table_optical() {
  return {constants::two_pi * constants::c_light / 1557.92e-9, constants::two_pi * 2.07e9,
          constants::two_pi * 7.61e9};
}

quantities::MicrowaveMode table_microwave() {
  return {constants::two_pi * 6.672e9, constants::two_pi * 2.53e6, constants::two_pi * 1.91e6};
}

quantities::SuperconductorParams table_film() {
  return {1.3e8,
          1.1,
          quantities::ev_to_joule(167e-6),
          quantities::per_ev_per_um3_to_si(1.72e10),
          100e-9,
          458e-9,
          433.0,
          140e-15};
}

// Same synthetic z-polarized cross-section as the transduction tests: a
// Gaussian mode over waveguide/oxide rows with a polymer top cladding.
eo::FieldGrid make_grid() {
  eo::FieldGrid g;
  g.nx = 48;
  g.ny = 32;
  g.dx = 25e-9;
  g.dy = 25e-9;
  const std::size_t n = g.size();
  g.ex.assign(n, {0.0, 0.0});
  g.ey.assign(n, {0.0, 0.0});
  g.ez.assign(n, {0.0, 0.0});
  g.eps.assign(n, {});
  g.delta_eps.assign(n, {});
  g.polymer_mask.assign(n, 0);

  const double n_e = 1.70;
  const double d_eps_zz = -std::pow(n_e, 4) * 20e-12 * (0.8 / 2.1e-6) * 1.0;
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const std::size_t i = iy * g.nx + ix;
      const double x = (static_cast<double>(ix) - 23.5) / 10.0;
      const double y = (static_cast<double>(iy) - 15.5) / 7.0;
      g.ez[i] = std::polar(std::exp(-0.5 * (x * x + y * y)), 0.3 * x + 0.1 * y);
      const bool in_polymer = iy >= 20;
      g.eps[i].xx = g.eps[i].yy = g.eps[i].zz =
          in_polymer ? n_e * n_e : (iy < 8 ? 2.1 : 12.1);
      if (in_polymer) {
        g.polymer_mask[i] = 1;
        g.delta_eps[i].zz = d_eps_zz;
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("at least one hardware thread is reported") {
  CHECK(parallel::hardware_threads() >= 1);
}

TEST_CASE("parallel_for visits every index exactly once under both policies") {
  for (ExecPolicy policy : {ExecPolicy::kSerial, ExecPolicy::kParallel}) {
    std::vector<int> hits(1000, 0);
    parallel::parallel_for(policy, 1000, [&](std::ptrdiff_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    // zero-length loop is a no-op
    parallel::parallel_for(policy, 0, [&](std::ptrdiff_t) { hits[0] += 100; });
    CHECK(hits[0] == 1);
  }
}

TEST_CASE("indexed_sum is bitwise policy-invariant on an ill-conditioned series") {
  // Alternating magnitudes make the result sensitive to accumulation order,
  // so agreement must come from the fixed-order reduction, not from luck.
  const auto term = [](std::ptrdiff_t i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(0.01 * double(i % 997)) / (double(i) + 0.5);
  };
  const double serial = parallel::indexed_sum(ExecPolicy::kSerial, 20000, term);
  const double par = parallel::indexed_sum(ExecPolicy::kParallel, 20000, term);
  CHECK(serial == par);

  // matches a plain left-to-right loop exactly
  double plain = 0.0;
  for (std::ptrdiff_t i = 0; i < 20000; ++i) plain += term(i);
  CHECK(serial == plain);

  CHECK(parallel::indexed_sum(ExecPolicy::kParallel, 0, term) == 0.0);
}

TEST_CASE("parallel_map writes identical elements under both policies") {
  const auto f = [](std::ptrdiff_t i) { return std::sin(double(i)) * std::sqrt(double(i) + 0.5); };
  std::vector<double> serial, par(7, -1.0);
  parallel::parallel_map(ExecPolicy::kSerial, 5000, serial, f);
  parallel::parallel_map(ExecPolicy::kParallel, 5000, par, f);
  REQUIRE(serial.size() == 5000);
  REQUIRE(par.size() == 5000);  // resized, stale contents discarded
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == par[i]);
}

TEST_CASE("field-overlap tuning rate is bitwise policy-invariant") {
  const auto grid = make_grid();
  const double omega = constants::two_pi * constants::c_light / 1557.92e-9;
  const double serial = eo::tuning_rate_from_fields(grid, 1.0, omega, ExecPolicy::kSerial);
  const double par = eo::tuning_rate_from_fields(grid, 1.0, omega, ExecPolicy::kParallel);
  CHECK(serial != 0.0);
  CHECK(serial == par);
}

TEST_CASE("heated power sweep is bitwise policy-invariant") {
  const quantities::DeviceParams dev(table_optical(), table_microwave(), 100.0,
                                     constants::two_pi * 330.0);
  const double detuning = -dev.microwave.omega;
  std::vector<double> powers;
  for (int dbm = -36; dbm <= 4; ++dbm) powers.push_back(quantities::dbm_to_watts(dbm));

  eo::StrayLightModel stray;
  stray.absorbed_fraction = 3.0e-3;
  stray.film_volume_um3 = 2600.0;
  stray.base_density_um3 = 25.0;
  stray.mw_alpha_k = 0.0516;
  stray.film = table_film();

  const auto serial = eo::efficiency_vs_pump_power(dev, powers, detuning, stray,
                                                   ExecPolicy::kSerial);
  const auto par = eo::efficiency_vs_pump_power(dev, powers, detuning, stray,
                                                ExecPolicy::kParallel);
  REQUIRE(serial.size() == par.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].power_w == par[i].power_w);
    CHECK(serial[i].n_cav == par[i].n_cav);
    CHECK(serial[i].qp_density_um3 == par[i].qp_density_um3);
    CHECK(serial[i].gamma_tot == par[i].gamma_tot);
    CHECK(serial[i].efficiency == par[i].efficiency);
    CHECK(serial[i].error == par[i].error);
  }
}

TEST_CASE("batch lineshape fitting is bitwise policy-invariant") {
  spectra::FanoLorentzian base;
  base.f0_hz = 6.672e9;
  base.kappa_i_hz = 2.53e6;
  base.kappa_e_hz = 3.82e6;

  std::vector<spectra::Spectrum> traces;
  for (int k = 0; k < 6; ++k) {
    spectra::FanoLorentzian mk = base;
    mk.f0_hz = base.f0_hz + 1e6 * k;
    traces.push_back(spectra::eval_lineshape(
        mk, linspace(mk.f0_hz - 40e6, mk.f0_hz + 40e6, 801), 0.0,
        spectra::SpectrumKind::kMicrowaveS21));
  }

  const auto serial = spectra::fit_lineshape_batch(traces, spectra::GuessPolicy::kOverCoupled,
                                                   ExecPolicy::kSerial);
  const auto par = spectra::fit_lineshape_batch(traces, spectra::GuessPolicy::kOverCoupled,
                                                ExecPolicy::kParallel);
  REQUIRE(serial.size() == 6);
  REQUIRE(par.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(serial[k].model.f0_hz == par[k].model.f0_hz);
    CHECK(serial[k].model.kappa_i_hz == par[k].model.kappa_i_hz);
    CHECK(serial[k].model.kappa_e_hz == par[k].model.kappa_e_hz);
    CHECK(serial[k].model.fano_phase == par[k].model.fano_phase);
    CHECK(serial[k].model.scale == par[k].model.scale);
    CHECK(serial[k].model.bg_slope == par[k].model.bg_slope);
    CHECK(serial[k].model.bg_intercept == par[k].model.bg_intercept);
    CHECK(serial[k].cost == par[k].cost);
    CHECK(serial[k].flagged == par[k].flagged);
  }
}

TEST_CASE("time-resolved spectrum is bitwise policy-invariant") {
  const auto film = table_film();
  const double k_rec = sc::recombination_constant(film);
  dynamics::RateModel model;
  model.recombination_k = k_rec;
  model.background_generation = 5e3 * 5e3 / k_rec;
  model.generation_rate = (5e4 * 5e4 - 5e3 * 5e3) / k_rec;
  dynamics::PulseSchedule sched;
  sched.period = 400e-6;
  sched.on_duration = 200e-6;

  dynamics::ResonatorState state;
  state.film = film;
  state.f0_cold_hz = 6.672e9;
  state.alpha_k = 0.0516;
  state.kappa_e_hz = 1.0e6;
  state.kappa_i_other_hz = 2.0e5;

  const auto probe = linspace(state.f0_cold_hz - 8e6, state.f0_cold_hz + 2e6, 201);
  const auto t_out = linspace(0.0, 260e-6, 14);

  const auto serial = dynamics::time_resolved_spectrum(model, sched, state, probe, t_out, 5e3,
                                                       ExecPolicy::kSerial);
  const auto par = dynamics::time_resolved_spectrum(model, sched, state, probe, t_out, 5e3,
                                                    ExecPolicy::kParallel);
  REQUIRE(serial.s21.size() == par.s21.size());
  for (std::size_t i = 0; i < serial.s21.size(); ++i) CHECK(serial.s21[i] == par.s21[i]);
  for (std::size_t i = 0; i < serial.time_s.size(); ++i) {
    CHECK(serial.f0_hz[i] == par.f0_hz[i]);
    CHECK(serial.q_tot[i] == par.q_tot[i]);
    CHECK(serial.n_qp_um3[i] == par.n_qp_um3[i]);
  }
}

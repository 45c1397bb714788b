// Lineshape fitting, heterodyne synthesis/calibration, stroboscopic
// splittings and the spectrum CSV format.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eotk/constants.hpp"
#include "eotk/spectra.hpp"
#include "eotk/units.hpp"
#include "oracles.hpp"

using namespace eotk;
using oracles::rel_err;

namespace {

spectra::FanoLorentzian optical_model() {
  spectra::FanoLorentzian m;
  m.f0_hz = constants::c_light / 1557.92e-9;
  m.kappa_i_hz = 2.07e9;
  m.kappa_e_hz = 7.61e9;
  return m;
}

spectra::FanoLorentzian microwave_model() {
  spectra::FanoLorentzian m;
  m.f0_hz = 6.672e9;
  m.kappa_i_hz = 2.53e6;
  m.kappa_e_hz = 3.82e6;  // external width: two feedline ports' worth
  return m;
}

std::string temp_path(const char* name) {
  return std::string("/tmp/eotk_spectra_test_") + name;
}

}  // namespace

TEST_CASE("evaluated dip has the expected depth and symmetry") {
  auto m = optical_model();
  const double kt = m.kappa_tot_hz();
  const double on_res = spectra::eval_lineshape_point(m, m.f0_hz);
  const double expect = std::pow(1.0 - 2.0 * m.kappa_e_hz / kt, 2.0);
  CHECK(on_res == doctest::Approx(expect).epsilon(1e-12));
  // Far off resonance the reflection returns to the unit background.
  CHECK(spectra::eval_lineshape_point(m, m.f0_hz + 1e12) ==
        doctest::Approx(1.0).epsilon(1e-3));
  // Zero-phase dips are symmetric.
  CHECK(spectra::eval_lineshape_point(m, m.f0_hz + 3e9) ==
        doctest::Approx(spectra::eval_lineshape_point(m, m.f0_hz - 3e9)).epsilon(1e-12));
  // The background polynomial shifts the whole trace.
  spectra::FanoLorentzian tilted = m;
  tilted.bg_intercept = 0.25;
  CHECK(spectra::eval_lineshape_point(tilted, m.f0_hz + 1e12) ==
        doctest::Approx(1.25).epsilon(1e-3));
}

TEST_CASE("optical round trip at the tabulated parameters") {
  const auto m = optical_model();
  const auto grid = oracles::linspace(m.f0_hz - 30e9, m.f0_hz + 30e9, 6001);
  const auto fit = spectra::fit_lineshape(spectra::eval_lineshape(m, grid),
                                          spectra::GuessPolicy::kOverCoupled);
  CHECK(fit.converged);
  CHECK(!fit.flagged);
  CHECK(rel_err(fit.model.kappa_i_hz, m.kappa_i_hz) <= 1e-3);
  CHECK(rel_err(fit.model.kappa_e_hz, m.kappa_e_hz) <= 1e-3);
  CHECK(std::abs(fit.model.f0_hz - m.f0_hz) <= 1e-3 * m.kappa_tot_hz());
  // Intrinsic optical Q of the fitted dip: about 93,100.
  CHECK(fit.model.f0_hz / fit.model.kappa_i_hz == doctest::Approx(92961.9).epsilon(1e-3));
}

TEST_CASE("microwave round trip at the tabulated parameters") {
  const auto m = microwave_model();
  const auto grid = oracles::linspace(m.f0_hz - 40e6, m.f0_hz + 40e6, 4001);
  const auto fit = spectra::fit_lineshape(
      spectra::eval_lineshape(m, grid, 0.0, spectra::SpectrumKind::kMicrowaveS21),
      spectra::GuessPolicy::kOverCoupled);
  CHECK(fit.converged);
  CHECK(!fit.flagged);
  CHECK(rel_err(fit.model.kappa_i_hz, m.kappa_i_hz) <= 1e-3);
  CHECK(rel_err(fit.model.kappa_e_hz, m.kappa_e_hz) <= 1e-3);
  CHECK(rel_err(fit.model.kappa_tot_hz(), 6.35e6) <= 1e-3);
}

TEST_CASE("coupling-branch policies resolve the symmetric ambiguity") {
  // A zero-phase dip cannot distinguish kappa_i from kappa_e; the two
  // policies must return the two branches with the same total width.
  const auto m = microwave_model();
  const auto grid = oracles::linspace(m.f0_hz - 40e6, m.f0_hz + 40e6, 2001);
  const auto trace = spectra::eval_lineshape(m, grid, 0.0,
                                             spectra::SpectrumKind::kMicrowaveS21);
  const auto over = spectra::fit_lineshape(trace, spectra::GuessPolicy::kOverCoupled);
  const auto under = spectra::fit_lineshape(trace, spectra::GuessPolicy::kUnderCoupled);
  CHECK(over.converged);
  CHECK(under.converged);
  CHECK(rel_err(over.model.kappa_e_hz, under.model.kappa_i_hz) <= 1e-6);
  CHECK(rel_err(over.model.kappa_i_hz, under.model.kappa_e_hz) <= 1e-6);
  CHECK(rel_err(over.model.kappa_tot_hz(), under.model.kappa_tot_hz()) <= 1e-9);
  CHECK(over.model.kappa_e_hz > over.model.kappa_i_hz);
  CHECK(under.model.kappa_e_hz < under.model.kappa_i_hz);

  // kAuto picks one of the two branches and matches the total width.
  const auto both = spectra::fit_lineshape(trace, spectra::GuessPolicy::kAuto);
  CHECK(both.converged);
  CHECK(rel_err(both.model.kappa_tot_hz(), m.kappa_tot_hz()) <= 1e-6);
}

TEST_CASE("emission peaks fit with the peak policy") {
  spectra::FanoLorentzian tone;
  tone.f0_hz = 40e6;
  tone.kappa_i_hz = 1.2e3;
  tone.kappa_e_hz = 2.4e3;
  tone.fano_phase = 0.0;
  tone.scale = -3.0e-15;      // negative scale inverts the dip into a peak
  tone.bg_intercept = 5.0e-15;  // background must keep the trace positive
  const auto grid = oracles::linspace(40e6 - 50e3, 40e6 + 50e3, 3001);
  auto trace = spectra::eval_lineshape(tone, grid, 1e3, spectra::SpectrumKind::kHeterodyneRf);
  const auto fit = spectra::fit_lineshape(trace, spectra::GuessPolicy::kPeak);
  CHECK(fit.converged);
  CHECK(!fit.flagged);
  CHECK(rel_err(fit.model.kappa_tot_hz(), tone.kappa_tot_hz()) <= 1e-3);
  CHECK(std::abs(fit.model.f0_hz - tone.f0_hz) <= 1.0);
}

TEST_CASE("total width is unbiased under multiplicative noise") {
  const auto m = microwave_model();
  const auto grid = oracles::linspace(m.f0_hz - 40e6, m.f0_hz + 40e6, 801);
  const auto base = spectra::eval_lineshape(m, grid, 0.0,
                                            spectra::SpectrumKind::kMicrowaveS21);
  double sum = 0.0;
  int n_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    std::normal_distribution<double> gauss(0.0, 0.02);
    spectra::Spectrum noisy = base;
    for (double& v : noisy.psd) v = std::max(0.0, v * (1.0 + gauss(rng)));
    const auto fit = spectra::fit_lineshape(noisy, spectra::GuessPolicy::kAuto);
    if (!fit.flagged) {
      sum += fit.model.kappa_tot_hz();
      ++n_ok;
    }
  }
  CHECK(n_ok >= 190);
  CHECK(rel_err(sum / n_ok, m.kappa_tot_hz()) <= 0.01);
}

TEST_CASE("fits demand enough samples and valid spectra") {
  const auto m = microwave_model();
  const auto grid = oracles::linspace(m.f0_hz - 40e6, m.f0_hz + 40e6, 12);
  const auto trace = spectra::eval_lineshape(m, grid, 0.0,
                                             spectra::SpectrumKind::kMicrowaveS21);
  CHECK_THROWS_AS(spectra::fit_lineshape(trace), std::invalid_argument);

  spectra::Spectrum bad;
  bad.frequency_hz = {1.0, 2.0, 2.0};  // not strictly increasing
  bad.psd = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  spectra::Spectrum ragged;
  ragged.frequency_hz = {1.0, 2.0, 3.0};
  ragged.psd = {1.0, 1.0};
  CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);
}

TEST_CASE("batch fitting preserves order") {
  const auto m = microwave_model();
  std::vector<spectra::Spectrum> traces;
  std::vector<double> f0s;
  for (int k = 0; k < 6; ++k) {
    spectra::FanoLorentzian mk = m;
    mk.f0_hz = m.f0_hz + 1e6 * k;
    f0s.push_back(mk.f0_hz);
    traces.push_back(spectra::eval_lineshape(
        mk, oracles::linspace(mk.f0_hz - 40e6, mk.f0_hz + 40e6, 801), 0.0,
        spectra::SpectrumKind::kMicrowaveS21));
  }
  const auto fits = spectra::fit_lineshape_batch(traces, spectra::GuessPolicy::kOverCoupled);
  REQUIRE(fits.size() == traces.size());
  for (std::size_t k = 0; k < fits.size(); ++k) {
    CHECK(std::abs(fits[k].model.f0_hz - f0s[k]) <= 1.0);
  }
}

TEST_CASE("heterodyne synthesis and calibration are exact inverses") {
  const double rf_w = quantities::dbm_to_watts(-31.0);
  const double omega_mw = constants::two_pi * 6.672e9;
  const double incident = rf_w / (constants::hbar * omega_mw);
  const double flux = 2.2e-9 * incident;
  const spectra::DarkModel dark{2.0e-18, 1.0e-27};
  const spectra::HeterodyneGrid grid{39.5e6, 40.5e6, 4001};

  const auto pair = spectra::synthesize_heterodyne({{40.0e6, flux}}, 1.0e-17, 1.0e3, dark,
                                                   grid);
  const auto cal = spectra::calibrate_efficiency(pair.signal, pair.dark, 39.9e6, 40.1e6,
                                                 rf_w, omega_mw);
  CHECK(rel_err(cal.sideband_flux, flux) <= 1e-9);
  CHECK(rel_err(cal.incident_flux, incident) <= 1e-12);
  CHECK(rel_err(cal.efficiency, 2.2e-9) <= 1e-9);
  CHECK(rel_err(cal.shot_psd, 1.0e-17) <= 1e-9);
  CHECK(!cal.consistent_with_zero);
  CHECK(cal.window_lo_hz == doctest::Approx(39.9e6));
  CHECK(cal.window_hi_hz == doctest::Approx(40.1e6));
}

TEST_CASE("calibration holds to 5% at high SNR with noise") {
  const double rf_w = quantities::dbm_to_watts(-31.0);
  const double omega_mw = constants::two_pi * 6.672e9;
  const double flux = 2.2e-9 * rf_w / (constants::hbar * omega_mw);
  const spectra::DarkModel dark{2.0e-18, 1.0e-27};
  const spectra::HeterodyneGrid grid{39.5e6, 40.5e6, 4001};
  const auto pair = spectra::synthesize_heterodyne({{40.0e6, flux}}, 1.0e-17, 1.0e3, dark,
                                                   grid, 0.01, 7);
  const auto cal = spectra::calibrate_efficiency(pair.signal, pair.dark, 39.9e6, 40.1e6,
                                                 rf_w, omega_mw);
  CHECK(rel_err(cal.efficiency, 2.2e-9) <= 0.05);
  CHECK(cal.efficiency_err > 0.0);
  CHECK(!cal.consistent_with_zero);
}

TEST_CASE("a dark-equals-signal measurement is consistent with zero") {
  const double rf_w = quantities::dbm_to_watts(-31.0);
  const double omega_mw = constants::two_pi * 6.672e9;
  const spectra::DarkModel dark{2.0e-18, 1.0e-27};
  const spectra::HeterodyneGrid grid{39.5e6, 40.5e6, 2001};
  // No tones at all: the signal trace is shot floor plus dark background.
  const auto pair = spectra::synthesize_heterodyne({}, 1.0e-17, 1.0e3, dark, grid, 0.005, 11);
  const auto cal = spectra::calibrate_efficiency(pair.signal, pair.dark, 39.9e6, 40.1e6,
                                                 rf_w, omega_mw);
  CHECK(cal.consistent_with_zero);
  CHECK(cal.efficiency <= cal.efficiency_err / (rf_w / (constants::hbar * omega_mw)) *
                              cal.shot_psd * 10.0 + 1e-12);
}

TEST_CASE("calibration window validation") {
  const spectra::DarkModel dark{2.0e-18, 0.0};
  const spectra::HeterodyneGrid grid{39.5e6, 40.5e6, 1001};
  const auto pair = spectra::synthesize_heterodyne({{40.0e6, 1e8}}, 1.0e-17, 1.0e3, dark,
                                                   grid);
  // Flanking reference bands must fit inside the measured span.
  CHECK_THROWS_AS(spectra::calibrate_efficiency(pair.signal, pair.dark, 39.55e6, 40.45e6,
                                                1e-3, 1e10),
                  std::invalid_argument);
  // Window ends must be ordered.
  CHECK_THROWS_AS(spectra::calibrate_efficiency(pair.signal, pair.dark, 40.1e6, 39.9e6,
                                                1e-3, 1e10),
                  std::invalid_argument);
  // Mismatched grids are rejected.
  spectra::Spectrum clipped = pair.dark;
  clipped.frequency_hz.pop_back();
  clipped.psd.pop_back();
  CHECK_THROWS_AS(spectra::calibrate_efficiency(pair.signal, clipped, 39.9e6, 40.1e6,
                                                1e-3, 1e10),
                  std::invalid_argument);
}

TEST_CASE("stroboscopic split dip measures the electro-optic tuning") {
  // The strobe is only resolvable when the dip is narrow against the
  // splitting; a tenth of the tabulated optical widths gives clean halves.
  auto base = optical_model();
  base.kappa_i_hz *= 0.1;
  base.kappa_e_hz *= 0.1;
  const auto grid = oracles::linspace(base.f0_hz - 30e9, base.f0_hz + 30e9, 6001);

  const double split = 12.0e9;
  const auto trace = spectra::synthesize_split_dip(base, split, grid);
  const auto result = spectra::extract_splitting(trace, spectra::GuessPolicy::kOverCoupled);
  CHECK(result.converged);
  CHECK(rel_err(result.splitting_hz, split) <= 1e-3);

  // Splittings linear in drive voltage regress to the tuning slope. A
  // wavelength excursion d_lambda = lambda^2 df / c; build voltages for a
  // 3.7 pm/V device and recover the slope.
  const double lambda = constants::c_light / base.f0_hz;
  std::vector<double> v_pp, splits;
  for (double v : {2.0, 4.0, 6.0, 8.0}) {
    const double d_lambda = 3.7e-12 * v;  // pm/V * V
    v_pp.push_back(v);
    splits.push_back(d_lambda * constants::c_light / (lambda * lambda));
  }
  CHECK(spectra::tuning_pm_per_v(v_pp, splits, lambda) ==
        doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("spectrum CSV round trip with sidecar") {
  const auto m = microwave_model();
  const auto grid = oracles::linspace(m.f0_hz - 40e6, m.f0_hz + 40e6, 501);
  auto trace = spectra::eval_lineshape(m, grid, 1.0e3,
                                       spectra::SpectrumKind::kMicrowaveS21);
  const std::string path = temp_path("roundtrip.csv");
  spectra::write_spectrum_csv(trace, path);

  // Header and schema comment are present.
  std::ifstream in(path);
  std::string line1, line2;
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(line1.find("schema_version") != std::string::npos);
  CHECK(line2.find("frequency_hz") != std::string::npos);
  in.close();

  const auto back = spectra::read_spectrum_csv(path);
  REQUIRE(back.frequency_hz.size() == trace.frequency_hz.size());
  CHECK(back.rbw_hz == doctest::Approx(trace.rbw_hz));
  CHECK(back.kind == trace.kind);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.psd.size(); ++i) {
    worst = std::max(worst, std::abs(back.psd[i] - trace.psd[i]));
    worst = std::max(worst, std::abs(back.frequency_hz[i] - trace.frequency_hz[i]));
  }
  CHECK(worst <= 1e-9);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("malformed spectrum files are rejected with line information") {
  const std::string path = temp_path("malformed.csv");
  {
    std::ofstream out(path);
    out << "# schema_version 1\n";
    out << "frequency_hz,psd_w_per_hz\n";
    out << "1.0e6,2.0e-18\n";
    out << "2.0e6,not_a_number\n";
  }
  bool threw = false;
  try {
    spectra::read_spectrum_csv(path);
  } catch (const std::exception& e) {
    threw = true;
    CHECK(std::string(e.what()).find("4") != std::string::npos);  // line number
  }
  CHECK(threw);
  std::remove(path.c_str());

  CHECK_THROWS_AS(spectra::read_spectrum_csv(temp_path("missing_file.csv")),
                  std::runtime_error);
}

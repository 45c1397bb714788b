// BCS gap, Mattis-Bardeen conductivity, surface impedance, quasiparticle
// thermodynamics and the frequency-shift thermometer.
//
// Every integral-valued quantity is checked twice: once against an
// independent quadrature oracle that evaluates the raw defining integral
// with a different substitution and integrator (tests/oracles.hpp), and once
// against frozen regression values or closed-form limits.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/modes.hpp"
#include "eotk/superconductor.hpp"
#include "eotk/units.hpp"
#include "oracles.hpp"

using namespace eotk;
using oracles::rel_err;

namespace {
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
}  // namespace

TEST_CASE("gap equation agrees with the energy-space oracle across temperature") {
  const auto film = table_film();
  sc::GapCache cache;
  for (double t : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.99, 1.05}) {
    const double got = sc::gap_at_temperature(film, t, &cache).delta;
    const double want = oracles::gap_energy_space(film, t);
    CAPTURE(t);
    CHECK(rel_err(got, want) <= 1e-6);
  }
}

TEST_CASE("gap limits: zero-temperature value, monotone fall, closure below Tc") {
  const auto film = table_film();
  sc::GapCache cache;
  // Far below Tc the gap is the zero-temperature value exactly.
  CHECK(sc::gap_at_temperature(film, 1e-6, &cache).delta == film.delta0);
  CHECK(sc::gap_at_temperature(film, 1e-5, &cache).delta == film.delta0);

  double prev = film.delta0 * 1.0 + 1.0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.05}) {
    const double d = sc::gap_at_temperature(film, t, &cache).delta;
    CHECK(d < prev);
    CHECK(d > 0.0);
    prev = d;
  }

  // The self-consistent critical temperature sits just below the declared
  // 1.1 K because the tabulated gap-to-Tc ratio is slightly under 1.764.
  CHECK(sc::gap_at_temperature(film, 1.09, &cache).delta > 0.0);
  CHECK(sc::gap_at_temperature(film, 1.0999, &cache).delta == 0.0);
  CHECK(sc::gap_at_temperature(film, 1.5, &cache).delta == 0.0);
}

TEST_CASE("tabulated gap is the weak-coupling multiple of Tc") {
  const auto film = table_film();
  const double bcs = 1.764 * constants::k_b * film.t_c;
  CHECK(rel_err(bcs, quantities::ev_to_joule(167e-6)) <= 0.01);
  CHECK(rel_err(film.delta0, bcs) <= 0.01);
}

TEST_CASE("complex conductivity matches the raw-integrand oracle at seeded points") {
  const auto film = table_film();
  sc::GapCache cache;
  std::mt19937_64 rng(20260817ull);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double t = 0.275 + 0.66 * uni(rng);
    const double f = (1.0 + 14.0 * uni(rng)) * 1e9;
    const double w = constants::two_pi * f;
    const auto cc = sc::complex_conductivity(film, w, t, &cache);
    CAPTURE(t);
    CAPTURE(f);
    CHECK(rel_err(cc.sigma1, oracles::mb_sigma1(cc.delta, w, t)) <= 1e-6);
    CHECK(rel_err(cc.sigma2, oracles::mb_sigma2(cc.delta, w, t)) <= 1e-6);
  }
}

TEST_CASE("cold reactive response approaches pi Delta / (hbar omega)") {
  const auto film = table_film();
  const double w = constants::two_pi * 6.672e9;
  const double s2 = sc::complex_conductivity(film, w, 1e-5).sigma2;
  const double analytic = constants::pi * film.delta0 / (constants::hbar * w);
  CHECK(rel_err(s2, analytic) <= 5e-3);
  CHECK(rel_err(s2, 19.0) <= 5e-3);
  // Frozen regression value for the bundled film at 6.672 GHz.
  CHECK(s2 == doctest::Approx(18.981130).epsilon(1e-5));
}

TEST_CASE("dissipative part dies off exponentially at low temperature") {
  const auto film = table_film();
  const double w = constants::two_pi * 6.672e9;
  sc::GapCache cache;
  const double s1_350 = sc::complex_conductivity(film, w, 0.35, &cache).sigma1;
  const double s1_250 = sc::complex_conductivity(film, w, 0.25, &cache).sigma1;
  const double s1_150 = sc::complex_conductivity(film, w, 0.15, &cache).sigma1;
  // Boltzmann factors exp(Delta0/kB (1/T1 - 1/T2)), with Delta0/kB = 1.938 K:
  // about 9.2 between 0.25 and 0.35 K and about 176 between 0.15 and 0.25 K.
  CHECK(s1_350 > 7.0 * s1_250);
  CHECK(s1_250 > 100.0 * s1_150);
}

TEST_CASE("photon energies above the pair-breaking threshold are rejected") {
  const auto film = table_film();
  // 2 Delta0 / h is about 80.9 GHz for the bundled film.
  const double f_break = 2.0 * film.delta0 / constants::h_planck;
  CHECK_NOTHROW(sc::complex_conductivity(film, constants::two_pi * 0.95 * f_break, 0.1));
  CHECK_THROWS_AS(
      sc::complex_conductivity(film, constants::two_pi * 1.05 * f_break, 0.1),
      std::domain_error);
}

TEST_CASE("quasiparticle density: oracle agreement and low-temperature asymptote") {
  const auto film = table_film();
  sc::GapCache cache;
  for (double t : {0.3, 0.5, 0.7, 0.9}) {
    const auto qp = sc::qp_density(film, t, &cache);
    const double delta = sc::gap_at_temperature(film, t, &cache).delta;
    CAPTURE(t);
    CHECK(rel_err(qp.density, oracles::qp_density(film.n0, delta, t)) <= 1e-6);
  }
  // Boltzmann-tail formula 2 N0 sqrt(2 pi kB T Delta) exp(-Delta / kB T):
  // accurate to a few percent once kB T << Delta.
  const double n_100mk = sc::qp_density(film, 0.1, &cache).density;
  CHECK(rel_err(n_100mk, oracles::qp_density_low_t(film.n0, film.delta0, 0.1)) <= 0.03);
}

TEST_CASE("surface impedance of the bundled film") {
  const auto film = table_film();
  const double w = constants::two_pi * 6.672e9;
  const auto zs_cold = sc::surface_impedance(film, w, 1e-5);
  // Kinetic sheet inductance: frozen value, and the coarse tabulated scale.
  CHECK(zs_cold.ls == doctest::Approx(135.33e-15).epsilon(1e-3));
  CHECK(rel_err(zs_cold.ls, 140e-15) <= 0.50);
  CHECK(zs_cold.rs >= 0.0);
  CHECK(zs_cold.rs < 1e-9);  // essentially lossless at 10 uK

  // Warmer film: more loss, more inductance.
  const auto zs_warm = sc::surface_impedance(film, w, 0.7);
  CHECK(zs_warm.rs > 1e3 * zs_cold.rs);
  CHECK(zs_warm.ls > zs_cold.ls);
  // Consistency between the complex components and the packaged values.
  CHECK(zs_warm.zs.real() == doctest::Approx(zs_warm.rs).epsilon(1e-12));
  CHECK(zs_warm.zs.imag() == doctest::Approx(w * zs_warm.ls).epsilon(1e-12));
}

TEST_CASE("recombination constant and lifetime law") {
  const auto film = table_film();
  const double k_r = sc::recombination_constant(film);
  // Frozen: tau0 N0 (kB Tc)^3 / (2 Delta0^2), in um^-3 s.
  CHECK(k_r == doctest::Approx(0.1202728).epsilon(1e-4));
  const double tau_lo = sc::qp_lifetime(film, 5e3);
  const double tau_hi = sc::qp_lifetime(film, 5e4);
  CHECK(tau_lo == doctest::Approx(k_r / 5e3).epsilon(1e-12));
  CHECK(tau_lo / tau_hi == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(tau_lo == doctest::Approx(24.05e-6).epsilon(1e-3));
  CHECK_THROWS_AS(sc::qp_lifetime(film, 0.0), std::domain_error);
}

TEST_CASE("density-to-temperature inversion round-trips") {
  const auto film = table_film();
  sc::GapCache cache;
  for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double n = sc::qp_density(film, t, &cache).density;
    const auto back = sc::qp_temperature(film, n, &cache);
    CAPTURE(t);
    CHECK(rel_err(back.temperature, t) <= 1e-6);
    CHECK(back.density == doctest::Approx(n).epsilon(1e-12));
  }
  // Even an astronomically dilute gas still resolves to a temperature...
  const auto tiny = sc::qp_temperature(film, 1e-30, &cache);
  CHECK(sc::qp_density(film, tiny.temperature, &cache).density ==
        doctest::Approx(1e-30).epsilon(1e-6));
  // ...while exactly zero density means an unpopulated film at T = 0.
  const auto zero = sc::qp_temperature(film, 0.0, &cache);
  CHECK(zero.temperature == 0.0);
  CHECK(std::isinf(zero.lifetime));
  CHECK_THROWS_AS(sc::qp_temperature(film, -1.0, &cache), std::domain_error);
  // Densities above the near-Tc thermal value cannot be represented.
  CHECK_THROWS_AS(sc::qp_temperature(film, 1e12, &cache), std::domain_error);
}

TEST_CASE("resonator response: cold limit, softening, and quality factor") {
  const auto film = table_film();
  sc::GapCache cache;
  const double f0_cold = 6.672e9;
  const double alpha_k = 0.0516;
  const auto cold = sc::resonator_response(film, f0_cold, alpha_k, 1e-5, &cache);
  CHECK(rel_err(cold.f0_hz, f0_cold) <= 1e-12);
  CHECK(cold.q_qp > 1e12);  // thermal quasiparticle loss is negligible at 10 uK

  double prev_f0 = cold.f0_hz;
  double prev_q = cold.q_qp;
  for (double t : {0.3, 0.5, 0.7, 0.9}) {
    const auto r = sc::resonator_response(film, f0_cold, alpha_k, t, &cache);
    CHECK(r.f0_hz < prev_f0);  // kinetic inductance grows, frequency falls
    CHECK(r.q_qp < prev_q);    // quasiparticle loss grows
    CHECK(r.alpha_k > alpha_k * 0.99);
    prev_f0 = r.f0_hz;
    prev_q = r.q_qp;
  }
}

TEST_CASE("frequency-shift thermometer inverts the forward response") {
  const auto film = table_film();
  sc::GapCache cache;
  const double f0_cold = 6.672e9;
  const double alpha_k = 0.0516;
  for (double t : {0.3, 0.5, 0.7, 0.9}) {
    const double df = sc::resonator_response(film, f0_cold, alpha_k, t, &cache).f0_hz -
                      f0_cold;
    const auto back = sc::invert_frequency_shift(film, f0_cold, alpha_k, df, &cache);
    CAPTURE(t);
    CHECK(rel_err(back.temperature, t) <= 1e-6);
  }

  // The measured 33 MHz softening corresponds to a bath near 0.7 K.
  const auto at_33 = sc::invert_frequency_shift(film, f0_cold, alpha_k, -33e6, &cache);
  CHECK(at_33.temperature == doctest::Approx(0.680).epsilon(2e-3));
  CHECK(at_33.temperature >= 0.6);
  CHECK(at_33.temperature <= 1.0);
  CHECK(at_33.density == doctest::Approx(6.79e5).epsilon(2e-3));

  // Conventions: positive shifts are unphysical, zero maps to the floor.
  CHECK_THROWS_AS(sc::invert_frequency_shift(film, f0_cold, alpha_k, +1e6, &cache),
                  std::domain_error);
  const auto zero = sc::invert_frequency_shift(film, f0_cold, alpha_k, 0.0, &cache);
  CHECK(zero.temperature == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("gap cache returns the same values as cold calls") {
  const auto film = table_film();
  sc::GapCache cache;
  for (double t : {0.25, 0.6, 0.95}) {
    const double cached_first = sc::gap_at_temperature(film, t, &cache).delta;
    const double cached_second = sc::gap_at_temperature(film, t, &cache).delta;
    const double uncached = sc::gap_at_temperature(film, t, nullptr).delta;
    CHECK(cached_first == cached_second);
    CHECK(cached_first == uncached);
  }
}

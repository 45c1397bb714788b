// Unit conversions, mode bookkeeping and parameter validation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/modes.hpp"
#include "eotk/units.hpp"

using namespace eotk;
using namespace eotk::quantities;

TEST_CASE("physical constants carry their defining values") {
  CHECK(constants::h_planck == doctest::Approx(6.62607015e-34).epsilon(1e-15));
  CHECK(constants::hbar ==
        doctest::Approx(constants::h_planck / constants::two_pi).epsilon(1e-15));
  CHECK(constants::k_b == doctest::Approx(1.380649e-23).epsilon(1e-15));
  CHECK(constants::c_light == doctest::Approx(299792458.0).epsilon(1e-15));
  CHECK(constants::e_charge == doctest::Approx(1.602176634e-19).epsilon(1e-15));
  CHECK(constants::mu0 == doctest::Approx(1.25663706212e-6).epsilon(1e-12));
  CHECK(constants::eps0 == doctest::Approx(8.8541878128e-12).epsilon(1e-12));
}

TEST_CASE("power conversions") {
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6).epsilon(1e-14));
  for (double dbm : {-47.3, -10.0, 0.0, 3.5, 17.0}) {
    CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
  }
  CHECK_THROWS_AS(watts_to_dbm(0.0), std::domain_error);
  CHECK_THROWS_AS(watts_to_dbm(-1e-3), std::domain_error);
}

TEST_CASE("photon flux uses the photon energy h f") {
  const double p = 1e-3;
  const double f = 193.4e12;
  CHECK(photon_flux(p, f) ==
        doctest::Approx(p / (constants::h_planck * f)).epsilon(1e-15));
}

TEST_CASE("quality factor and rate conversions invert each other") {
  const double f0 = 6.672e9;  // Hz in, angular rate out
  for (double q : {1e3, 1.99e4, 9.31e4, 8e5}) {
    const double rate = rate_from_q(f0, q);
    CHECK(rate == doctest::Approx(constants::two_pi * f0 / q).epsilon(1e-15));
    CHECK(q_from_rate(f0, rate) == doctest::Approx(q).epsilon(1e-13));
  }
  CHECK_THROWS_AS(rate_from_q(f0, 0.0), std::domain_error);
  CHECK_THROWS_AS(q_from_rate(0.0, 1e6), std::domain_error);
}

TEST_CASE("angular frequency helpers") {
  CHECK(hz_to_rad(1.0) == doctest::Approx(constants::two_pi).epsilon(1e-15));
  CHECK(rad_to_hz(hz_to_rad(6.672e9)) == doctest::Approx(6.672e9).epsilon(1e-15));
}

TEST_CASE("energy-unit conversions") {
  CHECK(ev_to_joule(1.0) == doctest::Approx(constants::e_charge).epsilon(1e-15));
  CHECK(ev_to_joule(167e-6) == doctest::Approx(2.67563497878e-23).epsilon(1e-10));
  // per-eV per-um^3 -> per-J per-m^3: multiply by 1e18 / e.
  CHECK(per_ev_per_um3_to_si(1.72e10) ==
        doctest::Approx(1.72e10 * 1e18 / constants::e_charge).epsilon(1e-13));
}

TEST_CASE("optical mode composes total rate and derived quantities") {
  const OpticalMode o(constants::two_pi * constants::c_light / 1557.92e-9,
                      constants::two_pi * 2.07e9, constants::two_pi * 7.61e9);
  CHECK(o.kappa_tot == o.kappa_i + o.kappa_e);
  CHECK(o.f0_hz() == doctest::Approx(o.omega / constants::two_pi).epsilon(1e-15));
  CHECK(o.q_total() == doctest::Approx(o.omega / o.kappa_tot).epsilon(1e-15));
  // The bundled numbers: f0 about 192.4 THz, total Q about 19,900.
  CHECK(o.f0_hz() == doctest::Approx(1.92431e14).epsilon(1e-4));
  CHECK(o.q_total() == doctest::Approx(19879.3).epsilon(1e-4));
}

TEST_CASE("microwave mode counts the external port twice") {
  const MicrowaveMode m(constants::two_pi * 6.672e9, constants::two_pi * 2.53e6,
                        constants::two_pi * 1.91e6);
  CHECK(m.gamma_tot == m.gamma_i + 2.0 * m.gamma_e);
  CHECK(m.gamma_tot / constants::two_pi == doctest::Approx(6.35e6).epsilon(1e-12));
  CHECK(m.f0_hz() == doctest::Approx(6.672e9).epsilon(1e-14));
}

TEST_CASE("modes reject non-positive rates") {
  CHECK_THROWS_AS(OpticalMode(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OpticalMode(1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MicrowaveMode(1.0, 1.0, 0.0), std::invalid_argument);
  const double nan = std::nan("");
  CHECK_THROWS_AS(MicrowaveMode(nan, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("device parameters validate the impedance") {
  const OpticalMode o(1e15, 1e9, 1e9);
  const MicrowaveMode m(1e10, 1e6, 1e6);
  CHECK_NOTHROW(DeviceParams(o, m, 100.0));
  CHECK_THROWS_AS(DeviceParams(o, m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DeviceParams(o, m, -50.0), std::invalid_argument);
  // A negative vacuum rate is rejected; zero means "not specified".
  CHECK_NOTHROW(DeviceParams(o, m, 100.0, 0.0));
  CHECK_THROWS_AS(DeviceParams(o, m, 100.0, -1.0), std::invalid_argument);
}

TEST_CASE("film parameters cache the BCS interaction strength") {
  const SuperconductorParams film(1.3e8, 1.1, ev_to_joule(167e-6),
                                  per_ev_per_um3_to_si(1.72e10), 100e-9, 458e-9, 433.0,
                                  140e-15);
  // The weak-coupling normalization 1/acosh(E_debye / delta0).
  const double e_debye = constants::k_b * 433.0;
  CHECK(film.n0v() ==
        doctest::Approx(1.0 / std::acosh(e_debye / film.delta0)).epsilon(1e-14));
  CHECK(film.delta0 / (constants::k_b * film.t_c) == doctest::Approx(1.764).epsilon(0.02));
}

TEST_CASE("film parameters reject gap-to-Tc ratios away from weak coupling") {
  const double n0 = per_ev_per_um3_to_si(1.72e10);
  // 167 ueV belongs to Tc = 1.1 K; pairing it with 2 K breaks the BCS ratio.
  CHECK_THROWS_AS(SuperconductorParams(1.3e8, 2.0, ev_to_joule(167e-6), n0, 100e-9,
                                       458e-9, 433.0),
                  std::invalid_argument);
  // A Debye scale at or below the pair-breaking threshold is rejected.
  CHECK_THROWS_AS(SuperconductorParams(1.3e8, 1.1, ev_to_joule(167e-6), n0, 100e-9,
                                       458e-9, 0.5),
                  std::invalid_argument);
}

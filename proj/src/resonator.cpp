#include "eotk/resonator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/numerics.hpp"

namespace eotk::resonator {

namespace {

constexpr double kPi = constants::pi;
constexpr double kTwoPi = constants::two_pi;

// Self-capacitance per unit area and unit effective permittivity of a square
// spiral, calibrated once against a reference 27-turn, 76 um, 1 um pitch
// device whose impedance sqrt(L/C) is 1.2 kOhm under a 6.2 cladding; held
// fixed thereafter (geometry sweeps probe monotonicity, not absolute C).
constexpr double kSpiralAreaCapacitance = 1.44790910e-6;  // F/m^2

}  // namespace

double elliptic_k(double k) {
  if (!(k >= 0.0) || k >= 1.0) {
    throw std::domain_error("elliptic_k: modulus must lie in [0, 1)");
  }
  double a = 1.0;
  double b = std::sqrt(1.0 - k * k);
  // AGM converges quadratically; 64 iterations is far beyond need.
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

CpwLineParams cpw_line_params(double center_width, double gap, double substrate_eps_eff) {
  if (!(center_width > 0.0) || !(gap > 0.0)) {
    throw std::domain_error("cpw_line_params: dimensions must be positive");
  }
  if (!(substrate_eps_eff >= 1.0)) {
    throw std::domain_error("cpw_line_params: relative permittivity must be >= 1");
  }
  const double k = center_width / (center_width + 2.0 * gap);
  const double kp = std::sqrt(1.0 - k * k);
  const double kk = elliptic_k(k);
  const double kkp = elliptic_k(kp);
  CpwLineParams out;
  out.l_per_m = constants::mu0 / 4.0 * kkp / kk;
  // Field energy splits between vacuum above and substrate below.
  out.c_per_m = 2.0 * constants::eps0 * (1.0 + substrate_eps_eff) * kk / kkp;
  out.z0 = std::sqrt(out.l_per_m / out.c_per_m);
  return out;
}

KineticFraction cpw_kinetic_fraction(double center_width, double gap, double film_thickness,
                                     double ls_per_sq, double l_geom_per_m) {
  if (!(center_width > 0.0) || !(gap > 0.0) || !(film_thickness > 0.0)) {
    throw std::domain_error("cpw_kinetic_fraction: dimensions must be positive");
  }
  if (ls_per_sq < 0.0 || !(l_geom_per_m > 0.0)) {
    throw std::domain_error("cpw_kinetic_fraction: inductances out of range");
  }
  const double w = center_width;
  const double s = gap;
  const double t = film_thickness;
  const double k = w / (w + 2.0 * s);
  const double kk = elliptic_k(k);
  // Thin-film current-crowding weights for a CPW cross-section. The center
  // and ground terms share the 2(1-k^2)K(k)^2 normalization; lengths are
  // normalized by the center width so the weights carry 1/m.
  const double norm = 2.0 * (1.0 - k * k) * kk * kk * w;
  const double term_center = -std::log(t / (4.0 * w));
  const double term_ground = -(w / (w + 2.0 * s)) * std::log(t / (4.0 * (w + 2.0 * s))) +
                             (2.0 * (w + s) / (w + 2.0 * s)) * std::log(s / (w + s));
  KineticFraction out;
  out.g_center = term_center / norm;
  out.g_ground = term_ground / norm;
  out.lk_per_m = (out.g_center + out.g_ground) * ls_per_sq;
  out.alpha_k = out.lk_per_m / (l_geom_per_m + out.lk_per_m);
  return out;
}

KineticFraction cpw_kinetic_fraction(const CpwGeometry& g) {
  if (!(g.film.ls_ref > 0.0)) {
    throw std::domain_error("cpw_kinetic_fraction: film sheet inductance not set");
  }
  return cpw_kinetic_fraction(g.center_width, g.gap, g.film.thickness, g.film.ls_ref, g.l_per_m);
}

double loaded_quarterwave_frequency(const CpwGeometry& g, double alpha_k) {
  if (!(g.length > 0.0) || !(g.l_per_m > 0.0) || !(g.c_per_m > 0.0)) {
    throw std::domain_error("loaded_quarterwave_frequency: line parameters must be positive");
  }
  if (!(alpha_k >= 0.0) || alpha_k >= 1.0) {
    throw std::domain_error("loaded_quarterwave_frequency: alpha_k must lie in [0, 1)");
  }
  if (g.load_capacitance < 0.0) {
    throw std::domain_error("loaded_quarterwave_frequency: load capacitance must be >= 0");
  }
  const double l_tot = g.l_per_m / (1.0 - alpha_k);
  const double v = 1.0 / std::sqrt(l_tot * g.c_per_m);
  const double z0 = std::sqrt(l_tot / g.c_per_m);
  const double f_unloaded = v / (4.0 * g.length);
  if (g.load_capacitance == 0.0) return f_unloaded;
  // Z0 tan(beta l) rises from 0 to +inf on (0, f_unloaded); 1/(w C) falls
  // monotonically, so exactly one crossing lies inside the bracket.
  const auto resonance = [&](double f) {
    const double w = kTwoPi * f;
    return z0 * std::tan(w * g.length / v) - 1.0 / (w * g.load_capacitance);
  };
  return numerics::find_root(resonance, 1e-3 * f_unloaded, (1.0 - 1e-9) * f_unloaded, 1e-14);
}

double spiral_inductance(const SpiralGeometry& g) {
  if (g.n_turns < 1) throw std::domain_error("spiral_inductance: need at least one turn");
  if (!(g.outer_diameter > 0.0) || !(g.wire_pitch > 0.0)) {
    throw std::domain_error("spiral_inductance: dimensions must be positive");
  }
  if (!(g.fill_factor > 0.0) || !(g.fill_factor < 1.0)) {
    throw std::domain_error("spiral_inductance: fill factor must lie in (0, 1)");
  }
  const double d_in = g.inner_diameter();
  if (!(d_in > 0.0)) {
    throw std::domain_error("spiral_inductance: turns do not fit in the outer diameter");
  }
  const double d_avg = 0.5 * (g.outer_diameter + d_in);
  const double rho = (g.outer_diameter - d_in) / (g.outer_diameter + d_in);
  // Current-sheet coefficients for a square layout.
  const double c1 = 1.27, c2 = 2.07, c3 = 0.18, c4 = 0.13;
  const double n = static_cast<double>(g.n_turns);
  return constants::mu0 * n * n * d_avg * c1 / 2.0 *
         (std::log(c2 / rho) + c3 * rho + c4 * rho * rho);
}

SpiralResonance spiral_resonance(const SpiralGeometry& g) {
  SpiralResonance out;
  out.inductance = spiral_inductance(g);
  const double eps_eff = 0.5 * (1.0 + g.cladding_permittivity);
  const double area = g.outer_diameter * g.outer_diameter;
  out.c_self = kSpiralAreaCapacitance * eps_eff * area;
  out.srf_hz = 1.0 / (kTwoPi * std::sqrt(out.inductance * out.c_self));
  out.impedance = std::sqrt(out.inductance / out.c_self);
  return out;
}

SlotAnalysis slot_circuit_analysis(const SlotCircuit& c, double resistivity_ohm_m) {
  if (!(c.slot_capacitance > 0.0) || !(c.electrode_capacitance > 0.0) ||
      !(c.slab_length_per_area > 0.0) || !(c.analysis_frequency_hz > 0.0)) {
    throw std::domain_error("slot_circuit_analysis: circuit elements must be positive");
  }
  if (resistivity_ohm_m < 0.0) {
    throw std::domain_error("slot_circuit_analysis: resistivity must be >= 0");
  }
  const double w = kTwoPi * c.analysis_frequency_hz;
  const double r = resistivity_ohm_m * c.slab_length_per_area;
  SlotAnalysis out;
  if (r == 0.0) {
    out.q_mw = std::numeric_limits<double>::infinity();
    out.f_3db_hz = std::numeric_limits<double>::infinity();
    out.voltage_fraction = 1.0;
    out.re_z = 0.0;
    out.im_z = -1.0 / (w * c.slot_capacitance);
    return out;
  }
  // Z = R / (1 + j w R C_e)  +  1 / (j w C_slot)
  const double x = w * r * c.electrode_capacitance;
  out.re_z = r / (1.0 + x * x);
  out.im_z = -x * r / (1.0 + x * x) - 1.0 / (w * c.slot_capacitance);
  out.q_mw = std::abs(out.im_z) / out.re_z;
  out.f_3db_hz = 1.0 / (kTwoPi * r * c.slot_capacitance);
  const double z_slot = 1.0 / (w * c.slot_capacitance);
  out.voltage_fraction = z_slot / std::hypot(out.re_z, out.im_z);
  return out;
}

}  // namespace eotk::resonator

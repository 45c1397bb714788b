#include "eotk/superconductor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/numerics.hpp"

namespace eotk::sc {

namespace {

constexpr double kBoltz = constants::k_b;
constexpr double kHbar = constants::hbar;
constexpr double kPi = constants::pi;

double fermi(double e, double t) {
  const double x = e / (kBoltz * t);
  if (x > 700.0) return 0.0;
  if (x < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(x));
}

// Gap-equation residual with the quasiparticle branch substituted as
// E = Delta*cosh(u); the 1/sqrt(E^2 - Delta^2) weight becomes du exactly,
// so the integrand is bounded at the lower limit.
//   R(Delta) = Int_0^{umax} (1 - 2 f(Delta cosh u, T)) du - arccosh(ED/Delta)
// The zero-temperature calibration arccosh(ED/Delta0) = 1/(N0 V) makes
// R(Delta0; T=0) = 0 by construction.
double gap_residual(const SuperconductorParams& p, double delta, double t) {
  const double ed = kBoltz * p.debye_temperature;
  const double umax = std::acosh(ed / delta);
  const auto integrand = [&](double u) {
    return 1.0 - 2.0 * fermi(delta * std::cosh(u), t);
  };
  const double lhs = numerics::integrate(integrand, 0.0, umax, 1e-12);
  return lhs - 1.0 / p.n0v();
}

}  // namespace

bool GapCache::lookup(double t, double* delta) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = table_.find(t);
  if (it == table_.end()) return false;
  *delta = it->second;
  return true;
}

void GapCache::store(double t, double delta) {
  std::lock_guard<std::mutex> lock(mu_);
  table_[t] = delta;
}

GapState gap_at_temperature(const SuperconductorParams& p, double t, GapCache* cache) {
  if (t < 0.0) throw std::domain_error("gap_at_temperature: negative temperature");
  GapState out;
  out.temperature = t;
  if (t >= p.t_c) {
    out.delta = 0.0;
    return out;
  }
  if (cache != nullptr && cache->lookup(t, &out.delta)) return out;
  if (t < 1e-4 * p.t_c) {
    out.delta = p.delta0;
    if (cache != nullptr) cache->store(t, out.delta);
    return out;
  }
  // Residual is positive at Delta -> Delta0 for T > 0 (thermal occupation
  // reduces the integral) and negative as Delta -> 0, so bracket and solve.
  const auto f = [&](double d) { return gap_residual(p, d, t); };
  double lo = 1e-6 * p.delta0;
  double hi = p.delta0;
  // Near Tc the root approaches 0; expand the lower bracket if needed.
  double flo = f(lo);
  double fhi = f(hi);
  if (flo * fhi > 0.0) {
    // Extremely close to Tc the gap may be below lo; report 0.
    out.delta = 0.0;
    if (cache != nullptr) cache->store(t, out.delta);
    return out;
  }
  out.delta = numerics::find_root(f, lo, hi, 1e-14 * p.delta0);
  if (cache != nullptr) cache->store(t, out.delta);
  return out;
}

ComplexConductivity complex_conductivity(const SuperconductorParams& p, double omega, double t,
                                         GapCache* cache) {
  if (omega <= 0.0) throw std::domain_error("complex_conductivity: omega must be positive");
  const GapState gs = gap_at_temperature(p, t, cache);
  const double delta = gs.delta;
  if (delta <= 0.0) throw std::domain_error("complex_conductivity: gap closed (T >= Tc)");
  const double hw = kHbar * omega;
  if (hw >= 2.0 * delta) {
    throw std::domain_error("complex_conductivity: photon energy above pair-breaking threshold");
  }

  ComplexConductivity out;
  out.delta = delta;

  // sigma1/sigma_n: thermally excited quasiparticles only (hw < 2 Delta).
  //   (2/hw) Int_Delta^inf [f(E) - f(E+hw)] g1(E) dE,
  //   g1(E) = (E^2 + Delta^2 + hw E) / (sqrt(E^2-Delta^2) sqrt((E+hw)^2-Delta^2)).
  // Substituting E = Delta*cosh(u) removes the lower-endpoint singularity:
  // dE/sqrt(E^2-Delta^2) = du.
  {
    const auto integrand = [&](double u) {
      const double e = delta * std::cosh(u);
      const double occ = fermi(e, t) - fermi(e + hw, t);
      if (occ == 0.0) return 0.0;
      const double num = e * e + delta * delta + hw * e;
      const double den = std::sqrt((e + hw) * (e + hw) - delta * delta);
      return occ * num / den;
    };
    // f(E) decays on scale kB*T; cosh(u) ~ exp(u)/2 so a generous cap works.
    const double ecut = delta + 60.0 * kBoltz * t;
    const double umax = std::acosh(std::max(ecut / delta, 1.0 + 1e-12));
    const double val = numerics::integrate(integrand, 0.0, umax, 1e-11);
    out.sigma1 = 2.0 / hw * val;
  }

  // sigma2/sigma_n over E in [Delta - hw, Delta]:
  //   (1/hw) Int [1 - 2 f(E+hw)] (E^2 + Delta^2 + hw E)
  //            / (sqrt(Delta^2 - E^2) sqrt((E+hw)^2 - Delta^2)) dE.
  // Both endpoints are integrable square-root singularities; with
  // E = mid + half*sin(theta) (mid = Delta - hw/2, half = hw/2) the measure
  // dE = half*cos(theta) dtheta cancels sqrt(Delta - E) * sqrt(E - Delta + hw)
  // = half*cos(theta), leaving a bounded integrand on [-pi/2, pi/2]:
  //   [1 - 2 f(E+hw)] (E^2 + Delta^2 + hw E) / (sqrt(Delta + E) sqrt(E + hw + Delta)).
  {
    const double lo = delta - hw;
    const double mid = 0.5 * (lo + delta);
    const double half = 0.5 * hw;
    const auto integrand = [&](double theta) {
      const double e = mid + half * std::sin(theta);
      const double occ = 1.0 - 2.0 * fermi(e + hw, t);
      const double num = e * e + delta * delta + hw * e;
      const double den = std::sqrt(delta + e) * std::sqrt(e + hw + delta);
      return occ * num / den;
    };
    const double val = numerics::integrate(integrand, -0.5 * kPi, 0.5 * kPi, 1e-11);
    out.sigma2 = val / hw;
  }
  return out;
}

SurfaceImpedance surface_impedance(const SuperconductorParams& p, double omega, double t,
                                   GapCache* cache) {
  const ComplexConductivity cc = complex_conductivity(p, omega, t, cache);
  const std::complex<double> sigma =
      p.sigma_n * std::complex<double>(cc.sigma1, -cc.sigma2);
  const std::complex<double> jwmu(0.0, omega * constants::mu0);
  const std::complex<double> gamma = std::sqrt(jwmu * sigma);  // propagation constant
  const std::complex<double> z_bulk = std::sqrt(jwmu / sigma);
  const std::complex<double> arg = gamma * p.thickness;
  // coth(z) = cosh(z)/sinh(z); |arg| is small for thin films, and std::sinh
  // on complex arguments is well-behaved in this regime.
  const std::complex<double> coth = std::cosh(arg) / std::sinh(arg);
  SurfaceImpedance out;
  out.zs = z_bulk * coth;
  out.rs = out.zs.real();
  out.ls = out.zs.imag() / omega;
  return out;
}

namespace {

double lifetime_or_inf(const SuperconductorParams& p, double density_um3) {
  if (density_um3 > 0.0 || p.tau_qp_max > 0.0) return qp_lifetime(p, density_um3);
  return std::numeric_limits<double>::infinity();
}

}  // namespace

QuasiparticleState qp_density(const SuperconductorParams& p, double t, GapCache* cache) {
  QuasiparticleState out;
  out.temperature = t;
  if (t <= 0.0) {
    out.density = 0.0;
    out.lifetime = lifetime_or_inf(p, 0.0);
    return out;
  }
  const GapState gs = gap_at_temperature(p, t, cache);
  if (gs.delta <= 0.0) throw std::domain_error("qp_density: gap closed (T >= Tc)");
  const double delta = gs.delta;
  // n_qp = 4 N0 Int_Delta^inf f(E) E / sqrt(E^2 - Delta^2) dE
  //      = 4 N0 Delta Int_0^umax f(Delta cosh u) cosh(u) du  (E = Delta cosh u)
  const auto integrand = [&](double u) {
    return fermi(delta * std::cosh(u), t) * std::cosh(u);
  };
  const double ecut = delta + 60.0 * kBoltz * t;
  const double umax = std::acosh(std::max(ecut / delta, 1.0 + 1e-12));
  const double val = numerics::integrate(integrand, 0.0, umax, 1e-12);
  const double n_si = 4.0 * p.n0 * delta * val;  // 1/m^3 with n0 in 1/(J m^3)
  out.density = n_si * 1e-18;                    // um^-3
  out.lifetime = lifetime_or_inf(p, out.density);
  return out;
}

QuasiparticleState qp_temperature(const SuperconductorParams& p, double density_um3,
                                  GapCache* cache) {
  if (density_um3 < 0.0) throw std::domain_error("qp_temperature: negative density");
  QuasiparticleState out;
  out.density = density_um3;
  out.lifetime = lifetime_or_inf(p, density_um3);
  if (density_um3 == 0.0) {
    out.temperature = 0.0;
    return out;
  }
  const double t_lo = 1e-3;
  // The declared Tc and the declared Delta0 are independently tabulated, so
  // the self-consistent gap can close slightly below t_c; walk the upper
  // bracket down until the gap is open there.
  double t_hi = 0.0;
  for (double eps : {1e-6, 1e-5, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    t_hi = p.t_c * (1.0 - eps);
    if (gap_at_temperature(p, t_hi, cache).delta > 0.0) break;
    t_hi = 0.0;
  }
  if (t_hi <= 0.0) throw std::domain_error("qp_temperature: no open-gap bracket below t_c");
  const double n_lo = qp_density(p, t_lo, cache).density;
  const double n_hi = qp_density(p, t_hi, cache).density;
  if (density_um3 <= n_lo) {
    out.temperature = t_lo;
    return out;
  }
  if (density_um3 >= n_hi) {
    throw std::domain_error("qp_temperature: density exceeds the near-Tc thermal value");
  }
  // Bisection on a strictly increasing map; solve in log-density for a
  // well-conditioned bracket across many decades.
  const double target = std::log(density_um3);
  const auto f = [&](double t) { return std::log(qp_density(p, t, cache).density) - target; };
  out.temperature = numerics::bisect(f, t_lo, t_hi, 1e-9);
  return out;
}

double recombination_constant(const SuperconductorParams& p) {
  const double kbtc = kBoltz * p.t_c;
  const double k_si = p.tau0 * p.n0 * kbtc * kbtc * kbtc / (2.0 * p.delta0 * p.delta0);
  return k_si * 1e-18;  // convert 1/m^3 s -> um^-3 s
}

double qp_lifetime(const SuperconductorParams& p, double density_um3) {
  if (density_um3 <= 0.0) {
    // With a saturation clamp configured the n -> 0 limit is well defined.
    if (p.tau_qp_max > 0.0 && density_um3 == 0.0) return p.tau_qp_max;
    throw std::domain_error("qp_lifetime: density must be positive");
  }
  const double tau = recombination_constant(p) / density_um3;
  return p.tau_qp_max > 0.0 ? std::min(tau, p.tau_qp_max) : tau;
}

ResonatorResponse resonator_response(const SuperconductorParams& p, double f0_cold_hz,
                                     double alpha_k_cold, double t, GapCache* cache) {
  if (f0_cold_hz <= 0.0) throw std::domain_error("resonator_response: f0 must be positive");
  if (alpha_k_cold <= 0.0 || alpha_k_cold >= 1.0) {
    throw std::domain_error("resonator_response: kinetic fraction must lie in (0, 1)");
  }
  const double omega = constants::two_pi * f0_cold_hz;
  const SurfaceImpedance cold = surface_impedance(p, omega, 1e-5, cache);
  const SurfaceImpedance warm = surface_impedance(p, omega, std::max(t, 1e-5), cache);
  const double r = warm.ls / cold.ls;  // Ls(T)/Ls(0) >= 1
  ResonatorResponse out;
  // L_total(T)/L_total(0) = 1 - a + a r with a the cold kinetic fraction.
  const double lr = 1.0 - alpha_k_cold + alpha_k_cold * r;
  out.f0_hz = f0_cold_hz / std::sqrt(lr);
  out.alpha_k = alpha_k_cold * r / lr;
  // Q limited by quasiparticle surface loss: omega L_total / R_total with
  // R_total = (geometry factor) Rs and L_kinetic = (same factor) Ls.
  out.q_qp = (1.0 / out.alpha_k) * omega * warm.ls / warm.rs;
  out.gamma_qp = omega / out.q_qp;
  return out;
}

QuasiparticleState invert_frequency_shift(const SuperconductorParams& p, double f0_cold_hz,
                                          double alpha_k_cold, double df_hz, GapCache* cache) {
  if (df_hz > 0.0) {
    throw std::domain_error("invert_frequency_shift: shift must be non-positive");
  }
  const double t_lo = 1e-3;
  if (df_hz == 0.0) return qp_density(p, t_lo, cache);
  const double target = f0_cold_hz + df_hz;
  const auto f = [&](double t) {
    return resonator_response(p, f0_cold_hz, alpha_k_cold, t, cache).f0_hz - target;
  };
  // Walk the upper bracket down until the film response is evaluable there:
  // near Tc the self-consistent gap closes (and before that drops below the
  // pair-breaking threshold of the probe frequency).
  double t_hi = 0.0;
  double f_hi = 0.0;
  for (double eps : {1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1}) {
    try {
      t_hi = p.t_c * (1.0 - eps);
      f_hi = f(t_hi);
      break;
    } catch (const std::domain_error&) {
      t_hi = 0.0;
    }
  }
  if (t_hi <= 0.0) {
    throw std::domain_error("invert_frequency_shift: no evaluable bracket below t_c");
  }
  const double f_lo = f(t_lo);
  if (f_lo < 0.0) {
    // Shift smaller than even the base-temperature response resolves: report
    // the lower bracket rather than failing, mirroring the f0_measured ==
    // f0_cold convention.
    return qp_density(p, t_lo, cache);
  }
  if (f_hi > 0.0) {
    throw std::domain_error("invert_frequency_shift: shift exceeds the near-Tc model range");
  }
  const double t = numerics::bisect(f, t_lo, t_hi, 1e-9);
  return qp_density(p, t, cache);
}

}  // namespace eotk::sc

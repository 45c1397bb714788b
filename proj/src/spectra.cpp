#include "eotk/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/nlls.hpp"

#include "json.hpp"

namespace eotk::spectra {

namespace {

constexpr double kPi = constants::pi;

// Parameter layout shared by the fit routines.
enum ParamIndex : std::size_t { kF0 = 0, kKi, kKe, kPhase, kScale, kSlope, kIntercept, kNParams };

FanoLorentzian model_from(const std::vector<double>& p) {
  FanoLorentzian m;
  m.f0_hz = p[kF0];
  m.kappa_i_hz = p[kKi];
  m.kappa_e_hz = p[kKe];
  m.fano_phase = p[kPhase];
  m.scale = p[kScale];
  m.bg_slope = p[kSlope];
  m.bg_intercept = p[kIntercept];
  return m;
}

std::vector<double> params_from(const FanoLorentzian& m) {
  return {m.f0_hz, m.kappa_i_hz, m.kappa_e_hz, m.fano_phase, m.scale, m.bg_slope,
          m.bg_intercept};
}

}  // namespace

void Spectrum::validate() const {
  if (frequency_hz.size() < 2 || frequency_hz.size() != psd.size()) {
    throw std::invalid_argument("Spectrum: frequency and psd arrays must match, size >= 2");
  }
  for (std::size_t i = 0; i + 1 < frequency_hz.size(); ++i) {
    if (!(frequency_hz[i + 1] > frequency_hz[i])) {
      throw std::invalid_argument("Spectrum: frequency grid must be strictly increasing");
    }
  }
  for (double v : psd) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("Spectrum: psd must be finite and non-negative");
    }
  }
}

double eval_lineshape_point(const FanoLorentzian& m, double f_hz) {
  const double df = f_hz - m.f0_hz;
  const double q = 0.5 * (m.kappa_i_hz + m.kappa_e_hz);
  const double den = df * df + q * q;
  const double re = std::cos(m.fano_phase) - m.kappa_e_hz * q / den;
  const double im = std::sin(m.fano_phase) + m.kappa_e_hz * df / den;
  return m.bg_intercept + m.bg_slope * df + m.scale * (re * re + im * im);
}

Spectrum eval_lineshape(const FanoLorentzian& m, const std::vector<double>& f_hz,
                        double rbw_hz, SpectrumKind kind) {
  Spectrum s;
  s.frequency_hz = f_hz;
  s.psd.resize(f_hz.size());
  for (std::size_t i = 0; i < f_hz.size(); ++i) s.psd[i] = eval_lineshape_point(m, f_hz[i]);
  s.rbw_hz = rbw_hz;
  s.kind = kind;
  s.validate();
  return s;
}

namespace {

// Residuals and the analytic Jacobian of the lineshape against a spectrum.
struct LineshapeTarget {
  const Spectrum* s;

  std::vector<double> residuals(const std::vector<double>& p) const {
    const FanoLorentzian m = model_from(p);
    std::vector<double> r(s->frequency_hz.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = eval_lineshape_point(m, s->frequency_hz[i]) - s->psd[i];
    }
    return r;
  }

  std::vector<double> jacobian(const std::vector<double>& p) const {
    const std::size_t n = s->frequency_hz.size();
    std::vector<double> jac(n * kNParams);
    const double ki = p[kKi], ke = p[kKe], phi = p[kPhase], scale = p[kScale];
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double q = 0.5 * (ki + ke);
    for (std::size_t i = 0; i < n; ++i) {
      const double df = s->frequency_hz[i] - p[kF0];
      const double den = df * df + q * q;
      const double inv = 1.0 / den;
      const double inv2 = inv * inv;
      const double re = cphi - ke * q * inv;
      const double im = sphi + ke * df * inv;
      // d(re,im)/d(f0, ki, ke) from differentiating q/den and df/den.
      const double re_f0 = -2.0 * ke * q * df * inv2;
      const double im_f0 = ke * (df * df - q * q) * inv2;
      const double re_ki = -0.5 * ke * (df * df - q * q) * inv2;
      const double im_ki = -ke * df * q * inv2;
      const double re_ke = -q * inv + re_ki;   // extra explicit -q/den term
      const double im_ke = df * inv + im_ki;   // extra explicit df/den term
      double* row = &jac[i * kNParams];
      row[kF0] = -p[kSlope] + 2.0 * scale * (re * re_f0 + im * im_f0);
      row[kKi] = 2.0 * scale * (re * re_ki + im * im_ki);
      row[kKe] = 2.0 * scale * (re * re_ke + im * im_ke);
      row[kPhase] = 2.0 * scale * (-re * sphi + im * cphi);
      row[kScale] = re * re + im * im;
      row[kSlope] = df;
      row[kIntercept] = 1.0;
    }
    return jac;
  }
};

struct GuessContext {
  double f_lo, f_hi, span, spacing;
  numerics::LinearFit edge_line;           // absolute-frequency baseline
  std::vector<double> net;                 // psd minus the edge line
  double line_at(double f) const { return edge_line.intercept + edge_line.slope * f; }
};

GuessContext make_guess_context(const Spectrum& s) {
  GuessContext g;
  const auto& f = s.frequency_hz;
  g.f_lo = f.front();
  g.f_hi = f.back();
  g.span = g.f_hi - g.f_lo;
  g.spacing = g.span / static_cast<double>(f.size() - 1);
  const std::size_t n_edge = std::max<std::size_t>(3, f.size() / 10);
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < n_edge; ++i) {
    fx.push_back(f[i]);
    fy.push_back(s.psd[i]);
    fx.push_back(f[f.size() - 1 - i]);
    fy.push_back(s.psd[f.size() - 1 - i]);
  }
  g.edge_line = numerics::fit_line(fx, fy);
  g.net.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g.net[i] = s.psd[i] - g.line_at(f[i]);
  return g;
}

// Full width of |net| crossing half of its extreme value around index i0;
// falls back to a tenth of the span when a side never crosses.
double half_level_width(const Spectrum& s, const std::vector<double>& net, std::size_t i0) {
  const double half = 0.5 * net[i0];
  const auto& f = s.frequency_hz;
  double left = f.front(), right = f.back();
  bool found_left = false, found_right = false;
  for (std::size_t i = i0; i-- > 0;) {
    if (std::abs(net[i]) <= std::abs(half)) {
      const double t = (half - net[i]) / (net[i + 1] - net[i]);
      left = f[i] + t * (f[i + 1] - f[i]);
      found_left = true;
      break;
    }
  }
  for (std::size_t i = i0 + 1; i < net.size(); ++i) {
    if (std::abs(net[i]) <= std::abs(half)) {
      const double t = (half - net[i - 1]) / (net[i] - net[i - 1]);
      right = f[i - 1] + t * (f[i] - f[i - 1]);
      found_right = true;
      break;
    }
  }
  if (found_left && found_right) return right - left;
  if (found_left) return 2.0 * (f[i0] - left);
  if (found_right) return 2.0 * (right - f[i0]);
  return 0.1 * (f.back() - f.front());
}

LineshapeFit run_fit(const Spectrum& s, const FanoLorentzian& start, bool peak) {
  LineshapeTarget target{&s};
  nlls::Problem prob;
  prob.residuals = [target](const std::vector<double>& p) { return target.residuals(p); };
  prob.jacobian = [target](const std::vector<double>& p) { return target.jacobian(p); };

  const double f_lo = s.frequency_hz.front();
  const double f_hi = s.frequency_hz.back();
  const double span = f_hi - f_lo;
  const double k_min = 0.25 * span / static_cast<double>(s.frequency_hz.size() - 1);
  const double k_max = 100.0 * span;
  const double big = 1e300;
  prob.lower = {f_lo, k_min, k_min, -kPi, peak ? -big : 0.0, -big, -big};
  prob.upper = {f_hi, k_max, k_max, kPi, peak ? 0.0 : big, big, big};
  prob.fixed.assign(kNParams, 0);
  // A magnitude spectrum determines only five of the six lineshape
  // parameters, so one must be pinned: the overall scale for dips (spectra
  // normalized to the off-resonant level), the phase for emission peaks.
  prob.fixed[peak ? kPhase : kScale] = 1;

  nlls::Result res = nlls::fit(prob, params_from(start));
  LineshapeFit out;
  out.model = model_from(res.params);
  out.errors = model_from(res.stderrs);
  out.cost = res.cost;
  out.converged = res.converged;
  out.at_bound = res.at_bound;
  out.flagged = !res.converged || res.at_bound;
  return out;
}

FanoLorentzian dip_start(const Spectrum& s, const GuessContext& g, bool over_coupled) {
  const std::size_t imin =
      std::min_element(g.net.begin(), g.net.end()) - g.net.begin();
  FanoLorentzian m;
  m.f0_hz = s.frequency_hz[imin];
  m.scale = 1.0;
  const double depth = std::clamp(-g.net[imin] / m.scale, 0.02, 0.98);
  const double kt = std::max(half_level_width(s, g.net, imin), 2.0 * g.spacing);
  const double u = over_coupled ? 0.5 * (1.0 + std::sqrt(1.0 - depth))
                                : 0.5 * (1.0 - std::sqrt(1.0 - depth));
  m.kappa_e_hz = std::max(u * kt, 1e-6 * kt);
  m.kappa_i_hz = std::max(kt - m.kappa_e_hz, 1e-6 * kt);
  m.fano_phase = 0.0;
  m.bg_slope = g.edge_line.slope;
  m.bg_intercept = g.line_at(m.f0_hz) - m.scale;
  return m;
}

FanoLorentzian peak_start(const Spectrum& s, const GuessContext& g) {
  const std::size_t imax =
      std::max_element(g.net.begin(), g.net.end()) - g.net.begin();
  FanoLorentzian m;
  m.f0_hz = s.frequency_hz[imax];
  const double height = std::max(g.net[imax], 1e-30);
  const double kt = std::max(half_level_width(s, g.net, imax), 2.0 * g.spacing);
  m.kappa_i_hz = 0.5 * kt;
  m.kappa_e_hz = 0.5 * kt;
  m.fano_phase = 0.0;
  m.scale = -height;
  m.bg_slope = g.edge_line.slope;
  m.bg_intercept = g.line_at(m.f0_hz) - m.scale;
  return m;
}

}  // namespace

LineshapeFit fit_lineshape(const Spectrum& s, GuessPolicy policy) {
  s.validate();
  if (s.frequency_hz.size() < 20) {
    throw std::invalid_argument("fit_lineshape: need at least 20 samples");
  }
  const GuessContext g = make_guess_context(s);
  switch (policy) {
    case GuessPolicy::kPeak:
      return run_fit(s, peak_start(s, g), /*peak=*/true);
    case GuessPolicy::kUnderCoupled:
      return run_fit(s, dip_start(s, g, /*over_coupled=*/false), /*peak=*/false);
    case GuessPolicy::kOverCoupled:
      return run_fit(s, dip_start(s, g, /*over_coupled=*/true), /*peak=*/false);
    case GuessPolicy::kAuto:
      break;
  }
  // A phase-0 dip is symmetric under swapping kappa_i and kappa_e, so try
  // both coupling branches and keep whichever explains the data better.
  LineshapeFit under = run_fit(s, dip_start(s, g, false), false);
  LineshapeFit over = run_fit(s, dip_start(s, g, true), false);
  return under.cost <= over.cost ? under : over;
}

std::vector<LineshapeFit> fit_lineshape_batch(const std::vector<Spectrum>& spectra,
                                              GuessPolicy policy,
                                              parallel::ExecPolicy exec) {
  std::vector<LineshapeFit> out(spectra.size());
  parallel::parallel_for(exec, spectra.size(),
                         [&](std::size_t i) { out[i] = fit_lineshape(spectra[i], policy); });
  return out;
}

HeterodynePair synthesize_heterodyne(const std::vector<SidebandTone>& tones,
                                     double lo_shot_psd, double rbw_hz,
                                     const DarkModel& dark, const HeterodyneGrid& grid,
                                     double noise_rel, std::uint64_t seed) {
  if (grid.n_points < 2 || !(grid.f_stop_hz > grid.f_start_hz)) {
    throw std::invalid_argument("synthesize_heterodyne: malformed frequency grid");
  }
  if (!(lo_shot_psd > 0.0) || !(rbw_hz > 0.0)) {
    throw std::invalid_argument("synthesize_heterodyne: shot PSD and RBW must be positive");
  }
  for (std::size_t a = 0; a < tones.size(); ++a) {
    if (tones[a].flux < 0.0) {
      throw std::invalid_argument("synthesize_heterodyne: tone flux must be non-negative");
    }
    if (tones[a].offset_hz < grid.f_start_hz || tones[a].offset_hz > grid.f_stop_hz) {
      throw std::invalid_argument("synthesize_heterodyne: tone lies outside the grid");
    }
    for (std::size_t b = a + 1; b < tones.size(); ++b) {
      if (tones[a].offset_hz == tones[b].offset_hz) {
        throw std::invalid_argument("synthesize_heterodyne: tone offsets must be distinct");
      }
    }
  }

  const std::size_t n = grid.n_points;
  const double df = (grid.f_stop_hz - grid.f_start_hz) / static_cast<double>(n - 1);
  HeterodynePair out;
  out.dark.frequency_hz.resize(n);
  out.dark.psd.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = grid.f_start_hz + df * static_cast<double>(k);
    out.dark.frequency_hz[k] = f;
    out.dark.psd[k] = dark.level_w_per_hz + dark.slope_w_per_hz_per_hz * (f - grid.f_start_hz);
  }
  out.dark.rbw_hz = rbw_hz;
  out.dark.kind = SpectrumKind::kHeterodyneRf;

  out.signal = out.dark;
  for (double& v : out.signal.psd) v += lo_shot_psd;

  // Each tone is an RBW-wide Gaussian, truncated at six sigma and rescaled
  // so its discrete integral is exactly flux * shot PSD; the calibration
  // pipeline is then an exact inverse on noiseless data.
  const double sigma = rbw_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double cut = 6.0 * sigma;
  for (const SidebandTone& tone : tones) {
    if (tone.flux == 0.0) continue;
    std::vector<double> shape(n, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = out.signal.frequency_hz[k] - tone.offset_hz;
      if (std::abs(d) > cut) continue;
      shape[k] = std::exp(-0.5 * d * d / (sigma * sigma));
      total += shape[k] * df;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("synthesize_heterodyne: grid too coarse for the RBW");
    }
    const double amp = tone.flux * lo_shot_psd / total;
    for (std::size_t k = 0; k < n; ++k) out.signal.psd[k] += amp * shape[k];
  }

  if (noise_rel > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : out.dark.psd) v = std::max(0.0, v * (1.0 + noise_rel * gauss(rng)));
    for (double& v : out.signal.psd) v = std::max(0.0, v * (1.0 + noise_rel * gauss(rng)));
  }
  out.signal.validate();
  out.dark.validate();
  return out;
}

CalibrationResult calibrate_efficiency(const Spectrum& signal, const Spectrum& dark,
                                       double window_lo_hz, double window_hi_hz,
                                       double rf_power_incident_w, double omega_mw) {
  signal.validate();
  dark.validate();
  if (signal.frequency_hz.size() != dark.frequency_hz.size()) {
    throw std::invalid_argument("calibrate_efficiency: signal and dark grids differ in size");
  }
  for (std::size_t k = 0; k < signal.frequency_hz.size(); ++k) {
    const double a = signal.frequency_hz[k], b = dark.frequency_hz[k];
    if (std::abs(a - b) > 1e-9 * std::max({std::abs(a), std::abs(b), 1.0})) {
      throw std::invalid_argument("calibrate_efficiency: signal and dark grids differ");
    }
  }
  if (!(window_hi_hz > window_lo_hz)) {
    throw std::invalid_argument("calibrate_efficiency: empty peak window");
  }
  const double width = window_hi_hz - window_lo_hz;
  const auto& f = signal.frequency_hz;
  if (window_lo_hz - width < f.front() || window_hi_hz + width > f.back()) {
    throw std::invalid_argument(
        "calibrate_efficiency: window and flanking reference bands must lie inside the grid");
  }
  if (!(rf_power_incident_w > 0.0) || !(omega_mw > 0.0)) {
    throw std::invalid_argument("calibrate_efficiency: RF power and frequency must be positive");
  }

  const double df = (f.back() - f.front()) / static_cast<double>(f.size() - 1);

  // Step 1: remove the receiver background.
  std::vector<double> net(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) net[k] = signal.psd[k] - dark.psd[k];

  // Step 2: shot-noise level from the bands flanking the window.
  double ref_sum = 0.0, ref_sq = 0.0;
  std::size_t n_ref = 0, n_win = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const bool left = f[k] >= window_lo_hz - width && f[k] < window_lo_hz;
    const bool right = f[k] > window_hi_hz && f[k] <= window_hi_hz + width;
    if (left || right) {
      ref_sum += net[k];
      ref_sq += net[k] * net[k];
      ++n_ref;
    } else if (f[k] >= window_lo_hz && f[k] <= window_hi_hz) {
      ++n_win;
    }
  }
  if (n_ref < 2 || n_win < 1) {
    throw std::invalid_argument("calibrate_efficiency: window leaves too few samples");
  }
  const double shot = ref_sum / static_cast<double>(n_ref);
  const double ref_var =
      std::max(0.0, ref_sq / static_cast<double>(n_ref) - shot * shot);

  CalibrationResult out;
  out.window_lo_hz = window_lo_hz;
  out.window_hi_hz = window_hi_hz;
  out.shot_psd = shot;
  out.incident_flux = rf_power_incident_w / (constants::hbar * omega_mw);
  if (!(shot > 0.0)) {
    out.consistent_with_zero = true;  // no shot reference: nothing measurable
    return out;
  }

  // Step 3: integrate the peak above the shot level.
  double integral = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] >= window_lo_hz && f[k] <= window_hi_hz) integral += (net[k] - shot) * df;
  }
  const double integral_err =
      std::sqrt(ref_var * static_cast<double>(n_win)) * df;

  // Step 4: shot-noise referencing converts integrated power to photon flux.
  out.sideband_flux = std::max(integral, 0.0) / shot;
  out.efficiency = out.sideband_flux / out.incident_flux;
  out.efficiency_err = integral_err / shot / out.incident_flux;
  out.consistent_with_zero = integral <= integral_err;
  return out;
}

Spectrum synthesize_split_dip(const FanoLorentzian& base, double splitting_hz,
                              const std::vector<double>& f_hz, double rbw_hz) {
  if (!(splitting_hz >= 0.0)) {
    throw std::invalid_argument("synthesize_split_dip: splitting must be non-negative");
  }
  FanoLorentzian lo = base, hi = base;
  lo.f0_hz = base.f0_hz - 0.5 * splitting_hz;
  hi.f0_hz = base.f0_hz + 0.5 * splitting_hz;
  Spectrum s;
  s.frequency_hz = f_hz;
  s.psd.resize(f_hz.size());
  for (std::size_t i = 0; i < f_hz.size(); ++i) {
    s.psd[i] = 0.5 * (eval_lineshape_point(lo, f_hz[i]) + eval_lineshape_point(hi, f_hz[i]));
  }
  s.rbw_hz = rbw_hz;
  s.kind = SpectrumKind::kOpticalReflection;
  s.validate();
  return s;
}

SplitResult extract_splitting(const Spectrum& s, GuessPolicy policy) {
  s.validate();
  const double mid = 0.5 * (s.frequency_hz.front() + s.frequency_hz.back());
  Spectrum left, right;
  left.rbw_hz = right.rbw_hz = s.rbw_hz;
  left.kind = right.kind = s.kind;
  for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
    Spectrum& half = s.frequency_hz[i] < mid ? left : right;
    half.frequency_hz.push_back(s.frequency_hz[i]);
    half.psd.push_back(s.psd[i]);
  }
  SplitResult out;
  out.lower = fit_lineshape(left, policy);
  out.upper = fit_lineshape(right, policy);
  out.splitting_hz = out.upper.model.f0_hz - out.lower.model.f0_hz;
  out.converged = !out.lower.flagged && !out.upper.flagged;
  return out;
}

double tuning_pm_per_v(const std::vector<double>& v_pp,
                       const std::vector<double>& splitting_hz, double wavelength_m) {
  if (v_pp.size() != splitting_hz.size() || v_pp.size() < 2) {
    throw std::invalid_argument("tuning_pm_per_v: need matching series of at least 2 points");
  }
  if (!(wavelength_m > 0.0)) {
    throw std::invalid_argument("tuning_pm_per_v: wavelength must be positive");
  }
  // A frequency splitting df corresponds to a wavelength excursion
  // lambda^2 / c * df at the carrier.
  std::vector<double> dlambda(v_pp.size());
  const double conv = wavelength_m * wavelength_m / constants::c_light;
  for (std::size_t i = 0; i < v_pp.size(); ++i) dlambda[i] = conv * splitting_hz[i];
  return numerics::fit_line(v_pp, dlambda).slope * 1e12;
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
  s.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  os << "# schema_version 1\n";
  os << "frequency_hz,psd_w_per_hz\n";
  char buf[80];
  for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", s.frequency_hz[i], s.psd[i]);
    os << buf;
  }
  if (!os) throw std::runtime_error("write_spectrum_csv: write failed for " + path);

  nlohmann::json meta;
  meta["schema_version"] = 1;
  meta["rbw_hz"] = s.rbw_hz;
  switch (s.kind) {
    case SpectrumKind::kOpticalReflection: meta["kind"] = "optical_reflection"; break;
    case SpectrumKind::kMicrowaveS21: meta["kind"] = "microwave_s21"; break;
    case SpectrumKind::kHeterodyneRf: meta["kind"] = "heterodyne_rf"; break;
  }
  std::ofstream ms(path + ".json");
  if (!ms) throw std::runtime_error("write_spectrum_csv: cannot open " + path + ".json");
  ms << meta.dump(2) << "\n";
}

namespace {

double parse_double(const std::string& text, std::size_t begin, std::size_t end,
                    const std::string& path, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data() + begin;
  const char* last = text.data() + end;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed number");
  }
  return value;
}

}  // namespace

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_spectrum_csv: cannot open " + path);
  Spectrum s;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "frequency_hz,psd_w_per_hz") {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected header frequency_hz,psd_w_per_hz");
      }
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    s.frequency_hz.push_back(parse_double(line, 0, comma, path, line_no));
    s.psd.push_back(parse_double(line, comma + 1, line.size(), path, line_no));
  }
  if (!header_seen || s.frequency_hz.size() < 2) {
    throw std::runtime_error(path + ": truncated spectrum file");
  }

  const std::string sidecar = path + ".json";
  if (std::filesystem::exists(sidecar)) {
    std::ifstream ms(sidecar);
    nlohmann::json meta;
    try {
      ms >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(sidecar + ": " + e.what());
    }
    for (const auto& [key, value] : meta.items()) {
      if (key == "schema_version") {
        if (!value.is_number_integer() || value.get<int>() != 1) {
          throw std::runtime_error(sidecar + ": unsupported schema_version");
        }
      } else if (key == "rbw_hz") {
        s.rbw_hz = value.get<double>();
      } else if (key == "kind") {
        const std::string kind = value.get<std::string>();
        if (kind == "optical_reflection") s.kind = SpectrumKind::kOpticalReflection;
        else if (kind == "microwave_s21") s.kind = SpectrumKind::kMicrowaveS21;
        else if (kind == "heterodyne_rf") s.kind = SpectrumKind::kHeterodyneRf;
        else throw std::runtime_error(sidecar + ": unknown kind '" + kind + "'");
      } else {
        throw std::runtime_error(sidecar + ": unknown key '" + key + "'");
      }
    }
  }
  s.validate();
  return s;
}

}  // namespace eotk::spectra

#include "eotk/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "eotk/constants.hpp"
#include "eotk/nlls.hpp"
#include "eotk/ode.hpp"
#include "eotk/superconductor.hpp"

namespace eotk::dynamics {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}
}  // namespace

void PulseSchedule::validate() const {
  require(period > 0.0, "PulseSchedule: period must be positive");
  require(on_duration > 0.0 && on_duration <= period,
          "PulseSchedule: on_duration must lie in (0, period]");
  require(optical_power_on >= 0.0, "PulseSchedule: optical power must be non-negative");
  require(absorbed_fraction >= 0.0 && absorbed_fraction <= 1.0,
          "PulseSchedule: absorbed fraction must lie in [0, 1]");
  require(switch_rise_time >= 0.0, "PulseSchedule: switch rise time must be non-negative");
  require(switch_rise_time <= on_duration &&
              (on_duration == period || switch_rise_time <= period - on_duration),
          "PulseSchedule: switch rise time must fit inside both schedule phases");
}

bool PulseSchedule::light_on(double t) const {
  double tp = std::fmod(t, period);
  if (tp < 0.0) tp += period;
  return tp < on_duration;
}

double PulseSchedule::envelope(double t) const {
  double tp = std::fmod(t, period);
  if (tp < 0.0) tp += period;
  if (switch_rise_time == 0.0) return tp < on_duration ? 1.0 : 0.0;
  const auto smooth = [](double u) { return u * u * (3.0 - 2.0 * u); };
  if (tp < on_duration) {
    const double u = tp / switch_rise_time;
    return u >= 1.0 ? 1.0 : smooth(u);
  }
  const double u = (tp - on_duration) / switch_rise_time;
  return u >= 1.0 ? 0.0 : 1.0 - smooth(u);
}

void RateModel::validate() const {
  require(generation_rate >= 0.0, "RateModel: generation rate must be non-negative");
  require(background_generation >= 0.0,
          "RateModel: background generation must be non-negative");
  require(recombination_k > 0.0, "RateModel: recombination constant must be positive");
  require(bath_weight >= 0.0 && bath_weight <= 1.0,
          "RateModel: bath weight must lie in [0, 1]");
  if (bath_weight > 0.0) {
    require(tau_rise > 0.0 && tau_fall > 0.0,
            "RateModel: bath time constants must be positive");
  }
}

void TimeSeries::validate() const {
  if (time_s.empty() || time_s.size() != value.size()) {
    throw std::invalid_argument("TimeSeries: time and value arrays must match and be non-empty");
  }
  for (std::size_t i = 0; i + 1 < time_s.size(); ++i) {
    if (!(time_s[i + 1] > time_s[i])) {
      throw std::invalid_argument("TimeSeries: time grid must be strictly increasing");
    }
  }
}

double generation_from_power(double power_w, double absorbed_fraction, double gap_j,
                             double film_volume_um3) {
  require(power_w >= 0.0, "generation_from_power: power must be non-negative");
  require(absorbed_fraction >= 0.0 && absorbed_fraction <= 1.0,
          "generation_from_power: absorbed fraction must lie in [0, 1]");
  require(gap_j > 0.0 && film_volume_um3 > 0.0,
          "generation_from_power: gap and film volume must be positive");
  return power_w * absorbed_fraction / (gap_j * film_volume_um3);
}

TimeSeries simulate_qp_dynamics(const RateModel& model, const PulseSchedule& schedule,
                                const std::vector<double>& t_out, double n0_um3) {
  model.validate();
  schedule.validate();
  if (t_out.empty()) throw std::invalid_argument("simulate_qp_dynamics: empty output grid");
  if (!(t_out.front() >= 0.0)) {
    throw std::invalid_argument("simulate_qp_dynamics: output times must start at t >= 0");
  }
  for (std::size_t i = 0; i + 1 < t_out.size(); ++i) {
    if (!(t_out[i + 1] > t_out[i])) {
      throw std::invalid_argument("simulate_qp_dynamics: output times must increase");
    }
  }
  require(n0_um3 >= 0.0, "simulate_qp_dynamics: initial density must be non-negative");

  const auto deriv = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const double n = std::max(y[0], 0.0);
    const double h = y[1];
    const double s = schedule.envelope(t);
    const double g = model.generation_rate *
                         ((1.0 - model.bath_weight) * s + model.bath_weight * h) +
                     model.background_generation;
    dy[0] = g - n * n / model.recombination_k;
    if (model.bath_weight > 0.0) {
      const double tau = schedule.light_on(t) ? model.tau_rise : model.tau_fall;
      dy[1] = (s - h) / tau;
    } else {
      dy[1] = 0.0;
    }
  };

  // Integration breakpoints: every ramp corner inside the horizon, so each
  // segment sees a smooth right-hand side, merged with the output times.
  const double horizon = t_out.back();
  std::set<double> stops(t_out.begin(), t_out.end());
  stops.insert(0.0);
  for (double edge = 0.0; edge <= horizon; edge += schedule.period) {
    for (double c : {edge, edge + schedule.switch_rise_time, edge + schedule.on_duration,
                     edge + schedule.on_duration + schedule.switch_rise_time}) {
      if (c > 0.0 && c < horizon) stops.insert(c);
    }
  }

  TimeSeries out;
  out.time_s.reserve(t_out.size());
  out.value.reserve(t_out.size());
  std::vector<double> y = {n0_um3, 0.0};
  double t = 0.0;
  std::size_t next_out = 0;
  if (t_out[next_out] == 0.0) {
    out.time_s.push_back(0.0);
    out.value.push_back(y[0]);
    ++next_out;
  }
  for (double stop : stops) {
    if (stop <= t) continue;
    ode::integrate(deriv, y, t, stop, 1e-8, 1e-12);
    t = stop;
    while (next_out < t_out.size() && t_out[next_out] == stop) {
      out.time_s.push_back(stop);
      out.value.push_back(std::max(y[0], 0.0));
      ++next_out;
    }
  }
  out.validate();
  return out;
}

TimeSeries simulate_qp_dynamics(const RateModel& model, const PulseSchedule& schedule,
                                double horizon_s, std::size_t n_samples, double n0_um3) {
  if (!(horizon_s >= schedule.period)) {
    throw std::invalid_argument("simulate_qp_dynamics: horizon must cover one period");
  }
  if (n_samples < 2) throw std::invalid_argument("simulate_qp_dynamics: need >= 2 samples");
  std::vector<double> t_out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    t_out[i] = horizon_s * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  return simulate_qp_dynamics(model, schedule, t_out, n0_um3);
}

SpectrumMatrix time_resolved_spectrum(const RateModel& model, const PulseSchedule& schedule,
                                      const ResonatorState& state,
                                      const std::vector<double>& probe_hz,
                                      const std::vector<double>& t_out, double n0_um3,
                                      parallel::ExecPolicy exec) {
  if (probe_hz.size() < 2) {
    throw std::invalid_argument("time_resolved_spectrum: need a probe frequency grid");
  }
  require(state.kappa_e_hz > 0.0, "time_resolved_spectrum: coupling width must be positive");
  require(state.kappa_i_other_hz >= 0.0,
          "time_resolved_spectrum: residual loss must be non-negative");

  const TimeSeries n_of_t = simulate_qp_dynamics(model, schedule, t_out, n0_um3);
  SpectrumMatrix m;
  m.time_s = n_of_t.time_s;
  m.frequency_hz = probe_hz;
  m.n_qp_um3 = n_of_t.value;
  const std::size_t nt = m.time_s.size();
  const std::size_t nf = probe_hz.size();
  m.s21.resize(nt * nf);
  m.f0_hz.resize(nt);
  m.q_tot.resize(nt);

  sc::GapCache cache;
  parallel::parallel_for(exec, nt, [&](std::size_t it) {
    const double density = m.n_qp_um3[it];
    const double temp = sc::qp_temperature(state.film, density, &cache).temperature;
    const sc::ResonatorResponse resp =
        sc::resonator_response(state.film, state.f0_cold_hz, state.alpha_k, temp, &cache);
    const double kappa_i =
        state.kappa_i_other_hz + resp.gamma_qp / constants::two_pi;
    const double kappa_t = kappa_i + state.kappa_e_hz;
    m.f0_hz[it] = resp.f0_hz;
    m.q_tot[it] = resp.f0_hz / kappa_t;
    for (std::size_t jf = 0; jf < nf; ++jf) {
      const std::complex<double> den(0.5 * kappa_t, probe_hz[jf] - resp.f0_hz);
      m.s21[it * nf + jf] = 1.0 - state.kappa_e_hz / den;
    }
  });
  return m;
}

ExponentialFit fit_exponential(const TimeSeries& ts, double t_lo, double t_hi) {
  ts.validate();
  if (!(t_hi > t_lo)) throw std::invalid_argument("fit_exponential: empty window");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < ts.time_s.size(); ++i) {
    if (ts.time_s[i] >= t_lo && ts.time_s[i] <= t_hi) {
      t.push_back(ts.time_s[i] - t_lo);
      y.push_back(ts.value[i]);
    }
  }
  if (t.size() < 10) {
    throw std::invalid_argument("fit_exponential: need at least 10 samples in the window");
  }
  const double window = t.back();

  nlls::Problem prob;
  prob.residuals = [&t, &y](const std::vector<double>& p) {
    std::vector<double> r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      r[i] = p[0] * std::exp(-t[i] / p[1]) + p[2] - y[i];
    }
    return r;
  };
  prob.jacobian = [&t](const std::vector<double>& p) {
    std::vector<double> jac(t.size() * 3);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = std::exp(-t[i] / p[1]);
      jac[i * 3 + 0] = e;
      jac[i * 3 + 1] = p[0] * e * t[i] / (p[1] * p[1]);
      jac[i * 3 + 2] = 1.0;
    }
    return jac;
  };
  const double big = 1e300;
  prob.lower = {-big, 1e-4 * window, -big};
  prob.upper = {big, 1e4 * window, big};

  const double start_amp = y.front() - y.back();
  std::vector<double> start = {start_amp, window / 3.0, y.back()};
  nlls::Result res = nlls::fit(prob, start);

  ExponentialFit out;
  out.amplitude = res.params[0];
  out.tau_s = res.params[1];
  out.offset = res.params[2];
  out.amplitude_err = res.stderrs[0];
  out.tau_err = res.stderrs[1];
  out.offset_err = res.stderrs[2];
  out.cost = res.cost;
  out.converged = res.converged;
  out.flagged = !res.converged || res.at_bound || res.degenerate;
  return out;
}

void write_time_series_csv(const TimeSeries& ts, const std::string& path) {
  ts.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_time_series_csv: cannot open " + path);
  os << "# schema_version 1\n";
  os << "time_s,value\n";
  char buf[80];
  for (std::size_t i = 0; i < ts.time_s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", ts.time_s[i], ts.value[i]);
    os << buf;
  }
  if (!os) throw std::runtime_error("write_time_series_csv: write failed for " + path);
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

TimeSeries read_time_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_time_series_csv: cannot open " + path);
  TimeSeries ts;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "time_s,value") {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected header time_s,value");
      }
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    ts.time_s.push_back(parse_double(line, 0, comma, path, line_no));
    ts.value.push_back(parse_double(line, comma + 1, line.size(), path, line_no));
  }
  if (!header_seen || ts.time_s.empty()) {
    throw std::runtime_error(path + ": truncated time-series file");
  }
  ts.validate();
  return ts;
}

void write_spectrum_matrix_csv(const SpectrumMatrix& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_spectrum_matrix_csv: cannot open " + path);
  os << "# schema_version 1\n";
  os << "time_s";
  char buf[80];
  for (double f : m.frequency_hz) {
    std::snprintf(buf, sizeof(buf), ",%.17g", f);
    os << buf;
  }
  os << "\n";
  for (std::size_t it = 0; it < m.time_s.size(); ++it) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.time_s[it]);
    os << buf;
    for (std::size_t jf = 0; jf < m.frequency_hz.size(); ++jf) {
      std::snprintf(buf, sizeof(buf), ",%.17g", std::norm(m.at(it, jf)));
      os << buf;
    }
    os << "\n";
  }
  if (!os) throw std::runtime_error("write_spectrum_matrix_csv: write failed for " + path);
}

}  // namespace eotk::dynamics

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "eotk/modes.hpp"
#include "eotk/parallel.hpp"

// Time-domain quasiparticle response to pulsed illumination: the
// generation-recombination rate equation with a slow thermal-bath stage,
// synthetic time-resolved resonator spectra, and exponential fitting of the
// slow transients.
namespace eotk::dynamics {

// Square-wave optical drive: on for on_duration at the start of each period,
// with each switch smoothed over switch_rise_time.
struct PulseSchedule {
  double period = 0.0;             // s
  double on_duration = 0.0;        // s
  double optical_power_on = 0.0;   // W delivered while on
  double absorbed_fraction = 0.0;  // fraction of that power absorbed in the film
  double switch_rise_time = 0.0;   // s; 0 gives ideal edges

  void validate() const;
  // Drive envelope in [0, 1] at time t (smoothed square wave).
  double envelope(double t) const;
  // True when the unsmoothed square wave is high at time t.
  bool light_on(double t) const;
};

// dn/dt = G(t) - n^2 / K with G(t) = generation_rate * ((1 - bath_weight) *
// envelope + bath_weight * bath_state) + background_generation. The bath
// state relaxes toward the envelope with tau_rise (light on) or tau_fall
// (light off), adding the slow thermal drift on top of the fast
// quasiparticle transient.
struct RateModel {
  double generation_rate = 0.0;        // um^-3 s^-1 with the light fully on
  double background_generation = 0.0;  // um^-3 s^-1, light-independent
  double recombination_k = 0.0;        // um^-3 s, so tau_qp = K / n
  double tau_rise = 1.0;               // s
  double tau_fall = 1.0;               // s
  double bath_weight = 0.0;            // in [0, 1]

  void validate() const;
};

struct TimeSeries {
  std::vector<double> time_s;
  std::vector<double> value;

  void validate() const;  // strictly increasing time, matching sizes
};

// Generation rate (um^-3 s^-1) from absorbed optical power: every quantum of
// gap energy absorbed in the film volume breaks one pair state.
double generation_from_power(double power_w, double absorbed_fraction, double gap_j,
                             double film_volume_um3);

// Integrates the rate model over the requested output times (strictly
// increasing, starting at t >= 0) from initial density n0. Integration is
// piecewise between schedule edges with adaptive error control (1e-8
// relative).
TimeSeries simulate_qp_dynamics(const RateModel& model, const PulseSchedule& schedule,
                                const std::vector<double>& t_out, double n0_um3 = 0.0);

// Convenience overload: uniform sampling of [0, horizon] with n_samples
// points. The horizon must cover at least one schedule period.
TimeSeries simulate_qp_dynamics(const RateModel& model, const PulseSchedule& schedule,
                                double horizon_s, std::size_t n_samples,
                                double n0_um3 = 0.0);

// Microwave resonance probed during the pulse cycle.
struct ResonatorState {
  quantities::SuperconductorParams film;
  double f0_cold_hz = 0.0;        // resonance with no quasiparticles
  double alpha_k = 0.0;           // kinetic inductance fraction when cold
  double kappa_e_hz = 0.0;        // external coupling width
  double kappa_i_other_hz = 0.0;  // internal loss not from quasiparticles
};

// Stacked time traces: s21[it * frequency_hz.size() + jf] is the complex
// transmission at probe frequency jf during time slice it.
struct SpectrumMatrix {
  std::vector<double> time_s;
  std::vector<double> frequency_hz;
  std::vector<std::complex<double>> s21;
  std::vector<double> f0_hz;   // injected resonance frequency per slice
  std::vector<double> q_tot;   // injected total quality factor per slice
  std::vector<double> n_qp_um3;

  std::complex<double> at(std::size_t it, std::size_t jf) const {
    return s21[it * frequency_hz.size() + jf];
  }
};

// Simulates the density, maps each time slice through the film response to
// f0(t) and Q(t), and emits notch-filter transmission traces over the probe
// grid. Slices are independent and may be evaluated in parallel.
SpectrumMatrix time_resolved_spectrum(const RateModel& model, const PulseSchedule& schedule,
                                      const ResonatorState& state,
                                      const std::vector<double>& probe_hz,
                                      const std::vector<double>& t_out, double n0_um3 = 0.0,
                                      parallel::ExecPolicy exec = parallel::ExecPolicy::kSerial);

struct ExponentialFit {
  double amplitude = 0.0;  // value above the offset at the window start
  double tau_s = 0.0;
  double offset = 0.0;
  double amplitude_err = 0.0;
  double tau_err = 0.0;
  double offset_err = 0.0;
  double cost = 0.0;
  bool converged = false;
  bool flagged = false;  // degenerate or unconverged; CLI exit code 3
};

// Least-squares fit of amplitude * exp(-(t - t_lo)/tau) + offset over the
// samples with t in [t_lo, t_hi]; needs at least 10 of them.
ExponentialFit fit_exponential(const TimeSeries& ts, double t_lo, double t_hi);

// CSV emission: `# schema_version 1`, a `time_s,value` header, one row per
// sample.
void write_time_series_csv(const TimeSeries& ts, const std::string& path);
TimeSeries read_time_series_csv(const std::string& path);

// Spectrum matrix as CSV: `# schema_version 1`, a frequency header row
// (`time_s` followed by the probe frequencies), then |S21|^2 per row.
void write_spectrum_matrix_csv(const SpectrumMatrix& m, const std::string& path);

}  // namespace eotk::dynamics

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eotk/numerics.hpp"
#include "eotk/parallel.hpp"

// Resonance lineshapes, bounded least-squares fitting, synthetic heterodyne
// spectra and the shot-noise-referenced photon-flux calibration pipeline.
namespace eotk::spectra {

// Interference of a constant background path with a single-port cavity
// response on top of a linear baseline:
//
//   psd(f) = bg_intercept + bg_slope * (f - f0)
//          + scale * | e^{i fano_phase} - kappa_e / (i (f - f0) + kappa_tot / 2) |^2
//
// with kappa_tot = kappa_i + kappa_e, all widths in Hz. fano_phase = 0 gives
// a symmetric dip of FWHM kappa_tot reaching the baseline exactly at
// critical coupling (kappa_i = kappa_e, bg_intercept = 0, scale = 1).
// A negative scale with fano_phase = 0 and bg_intercept = -scale represents
// an emission peak of the same width (used for heterodyne tones).
struct FanoLorentzian {
  double f0_hz = 0.0;
  double kappa_i_hz = 0.0;
  double kappa_e_hz = 0.0;
  double fano_phase = 0.0;   // rad
  double scale = 1.0;        // power of the interfering background path
  double bg_slope = 0.0;     // per Hz, relative to f0
  double bg_intercept = 0.0; // additive offset

  double kappa_tot_hz() const { return kappa_i_hz + kappa_e_hz; }
};

enum class SpectrumKind : std::uint8_t { kOpticalReflection, kMicrowaveS21, kHeterodyneRf };

struct Spectrum {
  std::vector<double> frequency_hz;  // strictly increasing
  std::vector<double> psd;           // W/Hz (or normalized reflection)
  double rbw_hz = 0.0;
  SpectrumKind kind = SpectrumKind::kHeterodyneRf;

  void validate() const;  // throws std::invalid_argument on malformed data
};

double eval_lineshape_point(const FanoLorentzian& m, double f_hz);
Spectrum eval_lineshape(const FanoLorentzian& m, const std::vector<double>& f_hz,
                        double rbw_hz = 0.0,
                        SpectrumKind kind = SpectrumKind::kOpticalReflection);

// Branch selection for the fit's starting point. A phase-0 magnitude dip is
// exactly symmetric under swapping kappa_i and kappa_e, so the caller must
// say which coupling regime the device is in; kAuto tries both and keeps the
// lower-cost solution. kPeak fits an emission peak (scale freed, phase
// pinned to zero).
enum class GuessPolicy : std::uint8_t { kAuto, kUnderCoupled, kOverCoupled, kPeak };

struct LineshapeFit {
  FanoLorentzian model;
  FanoLorentzian errors;  // same fields, per-parameter standard errors
  double cost = 0.0;
  bool converged = false;
  bool at_bound = false;
  bool flagged = false;  // fit-quality problem; CLI maps this to exit code 3
};

// Bounded least squares against the lineshape. For dip policies the overall
// scale is held at its current model value (default 1): the data determine
// only five of the six shape parameters, so the spectrum is expected to be
// normalized to its off-resonant level.
LineshapeFit fit_lineshape(const Spectrum& s, GuessPolicy policy = GuessPolicy::kAuto);

// Batch fitting with deterministic output order (index-for-index).
std::vector<LineshapeFit> fit_lineshape_batch(
    const std::vector<Spectrum>& spectra, GuessPolicy policy,
    parallel::ExecPolicy exec = parallel::ExecPolicy::kSerial);

// ---- Heterodyne synthesis and calibration ------------------------------

// One converted tone in the RF spectrum of the heterodyne receiver.
struct SidebandTone {
  double offset_hz = 0.0;  // position on the analyzer axis
  double flux = 0.0;       // photons/s carried by the tone
};

// Featureless receiver background measured with the signal blocked.
struct DarkModel {
  double level_w_per_hz = 0.0;
  double slope_w_per_hz_per_hz = 0.0;  // linear tilt across the span
};

struct HeterodyneGrid {
  double f_start_hz = 0.0;
  double f_stop_hz = 0.0;
  std::size_t n_points = 0;
};

struct HeterodynePair {
  Spectrum signal;
  Spectrum dark;
};

// Builds (signal, dark) spectra: dark background, plus shot-noise floor and
// one finite-width peak per tone in the signal. Peaks are rescaled so that
// the discrete integral above the shot floor equals flux * lo_shot_psd
// exactly, making the calibration below an exact inverse on noiseless data.
// noise_rel > 0 adds seeded multiplicative Gaussian noise to both spectra.
HeterodynePair synthesize_heterodyne(const std::vector<SidebandTone>& tones,
                                     double lo_shot_psd, double rbw_hz,
                                     const DarkModel& dark, const HeterodyneGrid& grid,
                                     double noise_rel = 0.0, std::uint64_t seed = 0);

struct CalibrationResult {
  double sideband_flux = 0.0;       // photons/s recovered from the peak
  double incident_flux = 0.0;       // photons/s in the RF drive
  double efficiency = 0.0;
  double efficiency_err = 0.0;      // from the scatter of the reference bands
  double shot_psd = 0.0;            // shot-noise level used as the flux scale
  double window_lo_hz = 0.0;        // integration window, echoed for reports
  double window_hi_hz = 0.0;
  bool consistent_with_zero = false;
};

// Shot-noise-referenced efficiency: subtract the dark trace, read the shot
// level from the bands flanking the peak window (one window-width each
// side), integrate the peak above that level, divide by the shot PSD to get
// photon flux, and divide by the incident microwave photon flux.
CalibrationResult calibrate_efficiency(const Spectrum& signal, const Spectrum& dark,
                                       double window_lo_hz, double window_hi_hz,
                                       double rf_power_incident_w, double omega_mw);

// ---- Stroboscopic splitting --------------------------------------------

// Spectrum of a resonance toggled between two positions f0 +- splitting/2 by
// a square-wave drive: the time-averaged trace shows both dips at half
// contrast.
Spectrum synthesize_split_dip(const FanoLorentzian& base, double splitting_hz,
                              const std::vector<double>& f_hz, double rbw_hz = 0.0);

struct SplitResult {
  double splitting_hz = 0.0;
  LineshapeFit lower, upper;
  bool converged = false;
};

// Fits the two halves of the span independently and returns the distance
// between the recovered centers.
SplitResult extract_splitting(const Spectrum& s, GuessPolicy policy = GuessPolicy::kAuto);

// Slope of wavelength shift vs drive amplitude, in pm/V: each splitting is
// converted to a wavelength excursion at the carrier and regressed against
// the peak-to-peak voltage.
double tuning_pm_per_v(const std::vector<double>& v_pp,
                       const std::vector<double>& splitting_hz, double wavelength_m);

// ---- File formats -------------------------------------------------------

// CSV with a `# schema_version 1` comment, a `frequency_hz,psd_w_per_hz`
// header and one row per sample; rbw/kind live in a JSON sidecar written
// next to the CSV as <path>.json.
void write_spectrum_csv(const Spectrum& s, const std::string& path);
Spectrum read_spectrum_csv(const std::string& path);

}  // namespace eotk::spectra

#pragma once

#include <cstdint>
#include <string>

#include "eotk/config.hpp"

// Subcommand implementations behind the command-line front end. Each runner
// is pure given (config, input files, seed): repeated runs produce
// byte-identical output. Errors are returned, not printed, so the front end
// owns all I/O.
namespace eotk::runners {

struct RunResult {
  int exit_code = 0;   // 0 success, 2 input/config error, 3 fit-quality flag
  std::string output;  // payload for --out (or stdout)
  std::string error;   // diagnostic for stderr when exit_code != 0
};

// Derived quantities at the configured operating point, shared by the report
// and sweep runners. Requires the device block; pump-dependent fields are
// zero when no pump block is present.
struct OperatingPoint {
  double g_v = 0.0;              // rad/s per volt, 0 when no tuning declared
  double v_zpf = 0.0;            // V
  double g0_derived = 0.0;       // rad/s, predicted from the declared tuning
  double g0_used = 0.0;          // rad/s: declared g0 when set, else derived
  bool has_pump = false;
  double power_at_device_w = 0.0;  // input power after the declared chain loss
  double n_cav = 0.0;
  double cooperativity = 0.0;
  double efficiency = 0.0;
  double bandwidth_fwhm_hz = 0.0;
  double sideband_ratio_db = 0.0;
};

OperatingPoint operating_point(const config::Config& cfg);

RunResult run_report(const config::Config& cfg);
RunResult run_sweep(const config::Config& cfg);
RunResult run_fit(const config::Config& cfg);
RunResult run_calibrate(const config::Config& cfg);
RunResult run_optimize(const config::Config& cfg, std::uint64_t seed);

}  // namespace eotk::runners

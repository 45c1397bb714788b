// Command-line front end: report, sweep, fit, calibrate, optimize.
//
// Exit codes: 0 success, 2 input/config error, 3 numerical/fit-quality flag.
// Every subcommand is pure given (config, input files, seed); repeated runs
// produce byte-identical output.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "eotk/config.hpp"
#include "eotk/runners.hpp"

namespace {

int emit(const eotk::runners::RunResult& r, const std::string& out_path) {
  if (!r.error.empty()) std::fprintf(stderr, "%s\n", r.error.c_str());
  if (out_path.empty()) {
    std::fputs(r.output.c_str(), stdout);
    return r.exit_code;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot open output file %s\n", out_path.c_str());
    return 2;
  }
  out << r.output;
  if (!out.good()) {
    std::fprintf(stderr, "error: failed writing %s\n", out_path.c_str());
    return 2;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"electro-optic transducer design and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "seed for randomized procedures (default 0)");
    sub->add_option("--out", out_path, "output file (default: stdout)");
  };

  CLI::App* cmd_report = app.add_subcommand("report", "device summary with consistency checks");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  CLI::App* cmd_fit = app.add_subcommand("fit", "lineshape or decay fit to JSON");
  CLI::App* cmd_calibrate =
      app.add_subcommand("calibrate", "shot-noise-referenced efficiency calibration");
  CLI::App* cmd_optimize =
      app.add_subcommand("optimize", "coordinate-descent design optimization");
  for (CLI::App* sub : {cmd_report, cmd_sweep, cmd_fit, cmd_calibrate, cmd_optimize}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);   // prints the usage message
    return code == 0 ? 0 : 2; // --help exits 0; any parse failure is an input error
  }

  try {
    eotk::config::Config cfg = eotk::config::load_config(config_path);
    eotk::runners::RunResult r;
    if (app.got_subcommand(cmd_report)) {
      r = eotk::runners::run_report(cfg);
    } else if (app.got_subcommand(cmd_sweep)) {
      r = eotk::runners::run_sweep(cfg);
    } else if (app.got_subcommand(cmd_fit)) {
      r = eotk::runners::run_fit(cfg);
    } else if (app.got_subcommand(cmd_calibrate)) {
      r = eotk::runners::run_calibrate(cfg);
    } else {
      r = eotk::runners::run_optimize(cfg, seed);
    }
    return emit(r, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

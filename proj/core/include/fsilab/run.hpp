#pragma once

#include <string>
#include <vector>

#include "fsilab/config.hpp"

namespace fsilab {

// One reported quantity with the bound it is held to.
struct CheckLine {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  double tolerance = 0.0;
  bool pass = false;
};
CheckLine make_check(const std::string& name, double value, const std::string& relation,
                     double tolerance);

enum ExitCode { exit_pass = 0, exit_validation = 2, exit_numerical = 3, exit_diffeo = 4 };

struct RunReport {
  std::string config_echo;
  RunMode mode = RunMode::local;
  std::vector<std::string> summary;  // free-form lines (iterations, spectra, ...)
  std::vector<CheckLine> checks;
  std::vector<std::string> files;    // paths written, relative to the output directory
  double wall_seconds = 0.0;
  int exit_code = exit_pass;
  std::string error;

  bool pass() const;
  std::string to_text() const;
};

// FSILAB_OUTPUT_DIR, when set and non-empty, replaces cfg.output_dir.
void apply_environment(RunConfig& cfg);

// Runs the configured mode, writes CSV files, state snapshots and report.txt
// into cfg.output_dir. Module errors are caught and turned into exit codes;
// report.txt is written on every path.
RunReport run_scenario(const RunConfig& cfg);

// Exit code for an exception escaping a run.
int exit_code_for(const std::exception& e);

// Density update with v = t (x, 0), identity metrics and rho0 = 1 + x y, whose
// exact solution is rho = rho0 (1 - t^2 / 2). Returns the largest nodal error
// of a single step from the exact value, over `steps` steps of size dt.
double density_closed_form_error(int n, double dt, int steps);

// Structured-grid text: header lines starting with '#', one row per node
// (x y rho v1 v2 theta), then one row per beam node (x eta1 eta2).
std::string snapshot_text(const Grid2D& g, const FullState& s);

}  // namespace fsilab

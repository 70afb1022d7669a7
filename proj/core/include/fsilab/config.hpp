#pragma once

#include <string>
#include <vector>

#include "fsilab/errors.hpp"
#include "fsilab/fixed_point.hpp"
#include "fsilab/params.hpp"

namespace fsilab {

enum class RunMode { local, global, spectrum, sector, convergence };
std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

// Operator examined by the sector mode.
enum class SectorTarget { afs, a0, plate };

struct RunConfig {
  RunMode mode = RunMode::local;
  double L = 1.0;
  double H = 1.0;
  int nx = 16;
  int ny = 16;
  PhysParams phys{};
  std::string scenario = "steady";
  double amplitude = 0.01;
  IterationConfig iter{};
  bool beta_given = false;
  std::string output_dir = "fsilab_out";
  unsigned seed = 1;
  int snapshots = 4;  // state files written per run, besides t = 0
  // spectrum / sector
  double sector_beta = 2.356194490192345;  // 3 pi / 4
  std::vector<double> radii{1e-2, 1.0, 1e2, 1e4};
  double gamma = -1.0;                     // < 0: search
  double sector_cap = 1e3;
  bool rho_h1_norm = false;
  SectorTarget sector_target = SectorTarget::afs;
  // convergence
  std::vector<int> resolutions{16, 32, 64};
  std::vector<int> plate_steps{20, 40, 80, 160};

  bool operator==(const RunConfig& o) const;
};

// Parse error with the offending line number.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, int line) : ConfigError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// key = value lines; '#' starts a comment. Overrides ("key=value") are applied
// after the document. Throws ParseError on malformed lines and ConfigError
// listing every constraint violation.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
// Every violation of a parsed configuration (empty when valid).
std::vector<std::string> config_violations(const RunConfig& cfg);
// Document that parses back to the same configuration.
std::string print_config(const RunConfig& cfg);

}  // namespace fsilab

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsilab/config.hpp"
#include "fsilab/run.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  long seed = -1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed for randomized probes")->check(CLI::NonNegativeNumber);
  cmd->add_option("--override", o.overrides, "key=value applied after the file (repeatable)");
}

std::string read_file(const std::string& path) {
  if (path.empty()) return "";
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Writes a report for a configuration that never reached a run.
int config_failure(const Options& o, const std::string& what) {
  fsilab::RunConfig cfg;
  fsilab::apply_environment(cfg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  fsilab::RunReport rep;
  rep.exit_code = fsilab::exit_validation;
  rep.error = what;
  rep.config_echo = "(configuration rejected)\n";
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  std::ofstream(std::filesystem::path(cfg.output_dir) / "report.txt") << rep.to_text();
  std::cerr << "fsilab: " << what << "\n";
  return fsilab::exit_validation;
}

int execute(const Options& o, const std::string& forced_mode) {
  std::vector<std::string> ov;
  if (!forced_mode.empty()) ov.push_back("mode=" + forced_mode);
  ov.insert(ov.end(), o.overrides.begin(), o.overrides.end());
  if (o.seed >= 0) ov.push_back("seed=" + std::to_string(o.seed));
  fsilab::RunConfig cfg;
  try {
    cfg = fsilab::parse_config(read_file(o.config), ov);
  } catch (const fsilab::ConfigError& e) {
    return config_failure(o, e.what());
  }
  fsilab::apply_environment(cfg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  const fsilab::RunReport rep = fsilab::run_scenario(cfg);
  std::cout << rep.to_text();
  if (!rep.error.empty()) std::cerr << "fsilab: " << rep.error << "\n";
  return rep.exit_code;
}

int show_report(const Options& o) {
  fsilab::RunConfig cfg;
  fsilab::apply_environment(cfg);
  if (!o.out.empty()) cfg.output_dir = o.out;
  const auto path = std::filesystem::path(cfg.output_dir) / "report.txt";
  std::ifstream f(path);
  if (!f) {
    std::cerr << "fsilab: no report at " << path.string() << "\n";
    return fsilab::exit_validation;
  }
  std::string line;
  int code = fsilab::exit_pass;
  while (std::getline(f, line)) {
    std::cout << line << "\n";
    if (line.rfind("exit code: ", 0) == 0) code = std::stoi(line.substr(11));
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsilab: compressible fluid and damped plate interaction toolkit"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
    const char* mode;
  };
  const Sub subs[] = {{"run", "run the mode given in the configuration", ""},
                      {"spectrum", "eigenvalues of the linearized operator on X_m", "spectrum"},
                      {"sector", "resolvent scan over a sector", "sector"},
                      {"converge", "manufactured convergence study", "convergence"}};
  std::vector<std::pair<CLI::App*, std::string>> cmds;
  for (const auto& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    add_common(c, o);
    cmds.emplace_back(c, s.mode);
  }
  CLI::App* report = app.add_subcommand("report", "print the report of a finished run");
  report->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fsilab::exit_validation;
  }
  if (*report) return show_report(o);
  for (const auto& [cmd, mode] : cmds)
    if (*cmd) return execute(o, mode);
  return fsilab::exit_validation;
}

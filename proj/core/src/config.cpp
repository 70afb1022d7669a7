#include "fsilab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fsilab/scenario.hpp"

namespace fsilab {

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::local: return "local";
    case RunMode::global: return "global";
    case RunMode::spectrum: return "spectrum";
    case RunMode::sector: return "sector";
    case RunMode::convergence: return "convergence";
  }
  return "local";
}

RunMode parse_run_mode(const std::string& s) {
  for (RunMode m : {RunMode::local, RunMode::global, RunMode::spectrum, RunMode::sector, RunMode::convergence})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode '" + s + "' (local, global, spectrum, sector, convergence)");
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = iter;
  const auto& b = o.iter;
  const auto& p = phys;
  const auto& q = o.phys;
  return mode == o.mode && L == o.L && H == o.H && nx == o.nx && ny == o.ny && p.mu == q.mu &&
         p.alpha == q.alpha && p.kappa == q.kappa && p.cv == q.cv && p.R0 == q.R0 && p.pi0 == q.pi0 &&
         p.rho_bar == q.rho_bar && p.theta_bar == q.theta_bar && scenario == o.scenario &&
         amplitude == o.amplitude && a.T == b.T && a.dt == b.dt && a.R == b.R &&
         a.max_iters == b.max_iters && a.tol == b.tol && a.abs_tol == b.abs_tol && a.beta == b.beta && a.p == b.p && a.q == b.q &&
         a.gamma1 == b.gamma1 && a.scheme == b.scheme && a.shear == b.shear &&
         a.nonlinear == b.nonlinear && a.flow_steps == b.flow_steps && a.c0 == b.c0 &&
         a.cutoff_lower == b.cutoff_lower && a.cutoff_upper == b.cutoff_upper &&
         a.cutoff_epsilon == b.cutoff_epsilon && beta_given == o.beta_given &&
         output_dir == o.output_dir && seed == o.seed && snapshots == o.snapshots &&
         sector_beta == o.sector_beta && radii == o.radii && gamma == o.gamma &&
         sector_cap == o.sector_cap && rho_h1_norm == o.rho_h1_norm &&
         sector_target == o.sector_target && resolutions == o.resolutions && plate_steps == o.plate_steps;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) out += fmt(v[i]);
    else out += std::to_string(v[i]);
  }
  return out;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool optional_print = false;  // printed only when relevant
};

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = [] {
    std::map<std::string, Key> m;
    auto dbl = [&m](const std::string& name, double RunConfig::*f) {
      m[name] = {[f](RunConfig& c, const std::string& v) { c.*f = to_double(v); },
                 [f](const RunConfig& c) { return fmt(c.*f); }};
    };
    auto phys = [&m](const std::string& name, double PhysParams::*f) {
      m[name] = {[f](RunConfig& c, const std::string& v) { c.phys.*f = to_double(v); },
                 [f](const RunConfig& c) { return fmt(c.phys.*f); }};
    };
    auto it_dbl = [&m](const std::string& name, double IterationConfig::*f) {
      m[name] = {[f](RunConfig& c, const std::string& v) { c.iter.*f = to_double(v); },
                 [f](const RunConfig& c) { return fmt(c.iter.*f); }};
    };
    m["mode"] = {[](RunConfig& c, const std::string& v) { c.mode = parse_run_mode(v); },
                 [](const RunConfig& c) { return to_string(c.mode); }};
    dbl("L", &RunConfig::L);
    dbl("H", &RunConfig::H);
    m["nx"] = {[](RunConfig& c, const std::string& v) { c.nx = static_cast<int>(to_long(v)); },
               [](const RunConfig& c) { return std::to_string(c.nx); }};
    m["ny"] = {[](RunConfig& c, const std::string& v) { c.ny = static_cast<int>(to_long(v)); },
               [](const RunConfig& c) { return std::to_string(c.ny); }};
    phys("mu", &PhysParams::mu);
    phys("alpha", &PhysParams::alpha);
    phys("kappa", &PhysParams::kappa);
    phys("cv", &PhysParams::cv);
    phys("R0", &PhysParams::R0);
    phys("pi0", &PhysParams::pi0);
    phys("rho_bar", &PhysParams::rho_bar);
    phys("theta_bar", &PhysParams::theta_bar);
    m["scenario"] = {[](RunConfig& c, const std::string& v) { c.scenario = v; },
                     [](const RunConfig& c) { return c.scenario; }};
    dbl("amplitude", &RunConfig::amplitude);
    it_dbl("T", &IterationConfig::T);
    it_dbl("dt", &IterationConfig::dt);
    it_dbl("R", &IterationConfig::R);
    it_dbl("tol", &IterationConfig::tol);
    it_dbl("abs_tol", &IterationConfig::abs_tol);
    it_dbl("p", &IterationConfig::p);
    it_dbl("q", &IterationConfig::q);
    it_dbl("gamma1", &IterationConfig::gamma1);
    it_dbl("c0", &IterationConfig::c0);
    it_dbl("cutoff_lower", &IterationConfig::cutoff_lower);
    it_dbl("cutoff_upper", &IterationConfig::cutoff_upper);
    it_dbl("cutoff_epsilon", &IterationConfig::cutoff_epsilon);
    m["beta"] = {[](RunConfig& c, const std::string& v) {
                   c.iter.beta = to_double(v);
                   c.beta_given = true;
                 },
                 [](const RunConfig& c) { return fmt(c.iter.beta); }, true};
    m["max_iters"] = {[](RunConfig& c, const std::string& v) { c.iter.max_iters = static_cast<int>(to_long(v)); },
                      [](const RunConfig& c) { return std::to_string(c.iter.max_iters); }};
    m["flow_steps"] = {[](RunConfig& c, const std::string& v) { c.iter.flow_steps = static_cast<int>(to_long(v)); },
                       [](const RunConfig& c) { return std::to_string(c.iter.flow_steps); }};
    m["scheme"] = {[](RunConfig& c, const std::string& v) {
                     if (v == "be") c.iter.scheme = TimeScheme::backward_euler;
                     else if (v == "cn") c.iter.scheme = TimeScheme::crank_nicolson;
                     else throw ConfigError("scheme must be 'be' or 'cn'");
                   },
                   [](const RunConfig& c) { return c.iter.scheme == TimeScheme::backward_euler ? "be" : "cn"; }};
    m["shear_heating"] = {[](RunConfig& c, const std::string& v) {
                            if (v == "as_printed") c.iter.shear = ShearHeating::as_printed;
                            else if (v == "consistent") c.iter.shear = ShearHeating::consistent;
                            else throw ConfigError("shear_heating must be 'as_printed' or 'consistent'");
                          },
                          [](const RunConfig& c) {
                            return c.iter.shear == ShearHeating::as_printed ? "as_printed" : "consistent";
                          }};
    m["nonlinear"] = {[](RunConfig& c, const std::string& v) { c.iter.nonlinear = to_bool(v); },
                      [](const RunConfig& c) { return c.iter.nonlinear ? "true" : "false"; }};
    m["output_dir"] = {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
                       [](const RunConfig& c) { return c.output_dir; }};
    m["seed"] = {[](RunConfig& c, const std::string& v) {
                   const long s = to_long(v);
                   if (s < 0) throw ConfigError("seed must be non-negative");
                   c.seed = static_cast<unsigned>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    m["snapshots"] = {[](RunConfig& c, const std::string& v) { c.snapshots = static_cast<int>(to_long(v)); },
                      [](const RunConfig& c) { return std::to_string(c.snapshots); }};
    dbl("sector_beta", &RunConfig::sector_beta);
    dbl("gamma", &RunConfig::gamma);
    dbl("sector_cap", &RunConfig::sector_cap);
    m["radii"] = {[](RunConfig& c, const std::string& v) {
                    c.radii.clear();
                    for (const auto& s : split_list(v)) c.radii.push_back(to_double(s));
                  },
                  [](const RunConfig& c) { return fmt_list(c.radii); }};
    m["rho_norm"] = {[](RunConfig& c, const std::string& v) {
                       if (v == "l2") c.rho_h1_norm = false;
                       else if (v == "h1") c.rho_h1_norm = true;
                       else throw ConfigError("rho_norm must be 'l2' or 'h1'");
                     },
                     [](const RunConfig& c) { return c.rho_h1_norm ? "h1" : "l2"; }};
    m["operator"] = {[](RunConfig& c, const std::string& v) {
                       if (v == "afs") c.sector_target = SectorTarget::afs;
                       else if (v == "a0") c.sector_target = SectorTarget::a0;
                       else if (v == "plate") c.sector_target = SectorTarget::plate;
                       else throw ConfigError("operator must be 'afs', 'a0' or 'plate'");
                     },
                     [](const RunConfig& c) {
                       return c.sector_target == SectorTarget::afs ? "afs"
                              : c.sector_target == SectorTarget::a0 ? "a0"
                                                                    : "plate";
                     }};
    m["resolutions"] = {[](RunConfig& c, const std::string& v) {
                          c.resolutions.clear();
                          for (const auto& s : split_list(v)) c.resolutions.push_back(static_cast<int>(to_long(s)));
                        },
                        [](const RunConfig& c) { return fmt_list(c.resolutions); }};
    m["plate_steps"] = {[](RunConfig& c, const std::string& v) {
                          c.plate_steps.clear();
                          for (const auto& s : split_list(v)) c.plate_steps.push_back(static_cast<int>(to_long(s)));
                        },
                        [](const RunConfig& c) { return fmt_list(c.plate_steps); }};
    return m;
  }();
  return k;
}

void set_key(RunConfig& cfg, std::set<std::string>& seen, const std::string& key,
             const std::string& value, std::vector<std::string>& errors) {
  if (key == "T_max") return set_key(cfg, seen, "T", value, errors);
  const auto it = keys().find(key);
  if (it == keys().end()) {
    errors.push_back("unknown key '" + key + "'");
    return;
  }
  try {
    it->second.set(cfg, value);
    seen.insert(key);
  } catch (const ConfigError& e) {
    errors.push_back(key + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> config_violations(const RunConfig& c) {
  std::vector<std::string> out;
  if (!(c.L > 0.0) || !(c.H > 0.0)) out.push_back("grid: L and H must be positive");
  if (c.nx < 4 || c.ny < 4) out.push_back("grid: nx and ny must be at least 4");
  const bool global = c.mode == RunMode::global || c.mode == RunMode::spectrum || c.mode == RunMode::sector;
  for (const auto& v : violations(c.phys, global)) out.push_back("params: " + v);
  if (c.mode == RunMode::global && !c.beta_given) out.push_back("missing required field 'beta' for mode=global");
  if (c.mode == RunMode::local || c.mode == RunMode::global) {
    const Mode m = c.mode == RunMode::local ? Mode::local : Mode::global;
    for (const auto& v : violations(c.iter, m))
      if (!(m == Mode::global && !c.beta_given && v.find("beta") != std::string::npos)) out.push_back("iteration: " + v);
    const auto ids = scenario_ids();
    if (std::find(ids.begin(), ids.end(), c.scenario) == ids.end())
      out.push_back("unknown scenario '" + c.scenario + "'");
    if (!std::isfinite(c.amplitude)) out.push_back("amplitude must be finite");
  }
  if (c.mode == RunMode::spectrum && (c.nx > 32 || c.ny > 32))
    out.push_back("spectrum: dense eigensolve limited to nx, ny <= 32");
  if (c.mode == RunMode::sector) {
    if (!(c.sector_beta > M_PI / 2 && c.sector_beta < M_PI)) out.push_back("sector: sector_beta must lie in (pi/2, pi)");
    if (c.radii.empty()) out.push_back("sector: radii must not be empty");
    for (double r : c.radii)
      if (!(r > 0.0)) out.push_back("sector: radii must be positive");
    if (!(c.sector_cap > 0.0)) out.push_back("sector: sector_cap must be positive");
  }
  if (c.mode == RunMode::convergence) {
    if (c.resolutions.size() < 2) out.push_back("convergence: need at least two resolutions");
    for (int r : c.resolutions)
      if (r < 4) out.push_back("convergence: resolutions must be at least 4");
    if (c.plate_steps.size() < 2) out.push_back("convergence: need at least two plate_steps");
  }
  if (c.snapshots < 0) out.push_back("snapshots must be non-negative");
  return out;
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto parse_line = [&](const std::string& raw, int no) {
    std::string s = raw.substr(0, raw.find('#'));
    s = trim(s);
    if (s.empty()) return;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(no) + ": expected key = value", no);
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(no) + ": empty key", no);
    set_key(cfg, seen, key, value, errors);
  };
  while (std::getline(in, line)) parse_line(line, ++lineno);
  for (const auto& o : overrides) parse_line(o, 0);
  if (!seen.count("ny")) cfg.ny = cfg.nx;
  for (const auto& v : config_violations(cfg)) errors.push_back(v);
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

std::string print_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [name, key] : keys()) {
    if (key.optional_print && !cfg.beta_given) continue;
    os << name << " = " << key.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace fsilab

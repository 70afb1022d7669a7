#include "fsilab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "fsilab/fs_operator.hpp"
#include "fsilab/scenario.hpp"

namespace fsilab {

namespace fs = std::filesystem;

CheckLine make_check(const std::string& name, double value, const std::string& relation,
                     double tolerance) {
  CheckLine c{name, value, relation, tolerance, false};
  if (!std::isfinite(value)) return c;
  if (relation == "<=") c.pass = value <= tolerance;
  else if (relation == "<") c.pass = value < tolerance;
  else if (relation == ">=") c.pass = value >= tolerance;
  else if (relation == ">") c.pass = value > tolerance;
  else if (relation == "==") c.pass = value == tolerance;
  return c;
}

bool RunReport::pass() const {
  return exit_code == exit_pass && std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

namespace {

std::ostringstream classic_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::string RunReport::to_text() const {
  std::ostringstream os = classic_stream();
  os << std::setprecision(6);
  os << "fsilab run report\n";
  os << "mode: " << to_string(mode) << "\n";
  os << "status: " << (pass() ? "PASS" : "FAIL") << "\n";
  os << "exit code: " << exit_code << "\n";
  os << "wall time [s]: " << wall_seconds << "\n";
  if (!error.empty()) os << "error: " << error << "\n";
  os << "\n[config]\n" << config_echo;
  if (!summary.empty()) {
    os << "\n[summary]\n";
    for (const auto& l : summary) os << l << "\n";
  }
  if (!checks.empty()) {
    os << "\n[checks]\n";
    for (const auto& c : checks)
      os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " " << c.relation << " "
         << c.tolerance << "\n";
  }
  if (!files.empty()) {
    os << "\n[files]\n";
    for (const auto& f : files) os << f << "\n";
  }
  return os.str();
}

void apply_environment(RunConfig& cfg) {
  if (const char* env = std::getenv("FSILAB_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_validation;
  if (dynamic_cast<const DiffeoFailure*>(&e) || dynamic_cast<const GeometryError*>(&e)) return exit_diffeo;
  return exit_numerical;
}

double density_closed_form_error(int n, double dt, int steps) {
  const Grid2D g(1.0, 1.0, n, n);
  const DiffOps ops = diff_ops(g);
  const Metrics m0 = identity_map(g).metrics();
  const ScalarField xs = g.xs(), ys = g.ys();
  const ScalarField rho0 = (1.0 + xs.array() * ys.array()).matrix();
  const ScalarField zero = ScalarField::Zero(g.node_count());
  auto exact = [&](double t) { return ScalarField(rho0 * (1.0 - 0.5 * t * t)); };
  auto vel = [&](double t) { return VectorField{t * xs, zero}; };
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * dt, t1 = (k + 1) * dt;
    const ScalarField r = step_density(ops, exact(t0), vel(t0), vel(t1), zero, zero, m0, rho0, dt);
    worst = std::max(worst, (r - exact(t1)).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::string snapshot_text(const Grid2D& g, const FullState& s) {
  std::ostringstream os = classic_stream();
  os << "# fsilab structured grid\n";
  os << "# t " << s.t << "\n";
  os << "# nx " << g.nx() << " ny " << g.ny() << " L " << g.length() << " H " << g.depth() << "\n";
  os << "# fluid " << g.node_count() << " rows: x y rho v1 v2 theta\n";
  for (int k = 0; k < g.node_count(); ++k)
    os << g.x(g.col(k)) << " " << g.y(g.row(k)) << " " << s.rho[k] << " " << s.v.x[k] << " "
       << s.v.y[k] << " " << s.theta[k] << "\n";
  os << "# beam " << g.beam_node_count() << " rows: x eta1 eta2\n";
  for (int i = 0; i < g.beam_node_count(); ++i)
    os << g.beam_x(i) << " " << s.eta1[i] << " " << s.eta2[i] << "\n";
  return os.str();
}

namespace {

class Writer {
 public:
  Writer(const fs::path& dir, RunReport& rep) : dir_(dir), rep_(rep) {}
  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw NumericalError("cannot write " + (dir_ / name).string());
    f << text;
    rep_.files.push_back(name);
  }

 private:
  fs::path dir_;
  RunReport& rep_;
};

std::string fmt(double v) {
  std::ostringstream os = classic_stream();
  os << std::setprecision(6) << v;
  return os.str();
}

double max_abs_field(const FullState& s) {
  return std::max({s.rho.cwiseAbs().maxCoeff(), s.v.x.cwiseAbs().maxCoeff(), s.v.y.cwiseAbs().maxCoeff(),
                   s.theta.cwiseAbs().maxCoeff(), s.eta1.cwiseAbs().maxCoeff(), s.eta2.cwiseAbs().maxCoeff()});
}

void write_iterations(Writer& w, const IterationReport& r) {
  std::ostringstream os = classic_stream();
  os << "iteration,bundle_norm,diff_norm,ratio\n";
  for (size_t k = 0; k < r.bundle_norms.size(); ++k) {
    os << k + 1 << "," << r.bundle_norms[k] << "," << r.diff_norms[k] << ",";
    if (k >= 1 && k - 1 < r.ratios.size()) os << r.ratios[k - 1];
    os << "\n";
  }
  w.write("iterations.csv", os.str());
}

void write_trajectory(Writer& w, const RunConfig& cfg, const Grid2D& g, const RunResult& res, const ConservedSeries& cons) {
  const auto& st = res.trajectory.states;
  std::ostringstream os = classic_stream();
  os << "t,dynamic_norm,max_abs_field,mass,energy\n";
  const bool local = res.trajectory.mode == Mode::local;
  for (size_t n = 0; n < st.size(); ++n) {
    FullState pert = st[n];
    if (local) {
      pert.rho.array() -= cfg.phys.rho_bar;
      pert.theta.array() -= cfg.phys.theta_bar;
    }
    os << st[n].t << "," << dynamic_norm(g, st[n]) << "," << max_abs_field(pert) << "," << cons.mass[n]
       << "," << cons.energy[n] << "\n";
  }
  w.write("timeseries.csv", os.str());
  const int N = static_cast<int>(st.size()) - 1;
  const int count = std::min(cfg.snapshots, std::max(N, 0));
  std::vector<int> picks{0};
  for (int k = 1; k <= count; ++k) picks.push_back(static_cast<int>(std::lround(double(k) * N / count)));
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  for (int n : picks) {
    std::ostringstream name;
    name << "state_" << std::setw(6) << std::setfill('0') << n << ".txt";
    w.write(name.str(), snapshot_text(g, st[n]));
  }
}

void add_iteration_summary(RunReport& rep, const IterationReport& r) {
  rep.summary.push_back("iteration status: " + to_string(r.status));
  rep.summary.push_back("iterations: " + std::to_string(r.iterations));
  rep.summary.push_back("initial data norm: " + fmt(r.initial_norm) + ", ball radius R: " + fmt(r.R));
  if (!r.ratios.empty())
    rep.summary.push_back("contraction ratios: first " + fmt(r.ratios.front()) + ", max " +
                          fmt(*std::max_element(r.ratios.begin(), r.ratios.end())));
  if (!r.message.empty()) rep.summary.push_back("message: " + r.message);
}

int status_code(IterationStatus s) {
  switch (s) {
    case IterationStatus::converged: return exit_pass;
    case IterationStatus::diffeo_failure: return exit_diffeo;
    default: return exit_numerical;
  }
}

void run_local_mode(const RunConfig& cfg, Writer& w, RunReport& rep) {
  const Grid2D g(cfg.L, cfg.H, cfg.nx, cfg.ny);
  const DiffOps ops = diff_ops(g);
  const FullState init = to_full_values(scenario_library(g, cfg.scenario, cfg.amplitude), cfg.phys);
  const RunResult res = run_local(g, ops, cfg.phys, init, cfg.iter);
  const ConservedSeries cons = conserved_quantities(g, ops, res.trajectory, cfg.phys);
  write_iterations(w, res.report);
  write_trajectory(w, cfg, g, res, cons);
  add_iteration_summary(rep, res.report);
  rep.checks.push_back(make_check("converged", res.report.status == IterationStatus::converged, "==", 1));
  if (!res.report.ratios.empty())
    rep.checks.push_back(make_check("max contraction ratio",
                                    *std::max_element(res.report.ratios.begin(), res.report.ratios.end()),
                                    "<", 1.0));
  rep.checks.push_back(make_check("mass drift per unit time", cons.drift_rate, "<=", 1e-5));
  rep.exit_code = status_code(res.report.status);
}

void run_global_mode(const RunConfig& cfg, Writer& w, RunReport& rep) {
  const Grid2D g(cfg.L, cfg.H, cfg.nx, cfg.ny);
  const DiffOps ops = diff_ops(g);
  const FullState init = scenario_library(g, cfg.scenario, cfg.amplitude);
  const RunResult res = run_global(g, ops, cfg.phys, init, cfg.iter);
  const ConservedSeries cons = conserved_quantities(g, ops, res.trajectory, cfg.phys);
  write_iterations(w, res.report);
  write_trajectory(w, cfg, g, res, cons);
  add_iteration_summary(rep, res.report);
  const IterationReport& r = res.report;
  rep.checks.push_back(make_check("converged", r.status == IterationStatus::converged, "==", 1));
  double peak = 0.0;
  for (const auto& s : res.trajectory.states) peak = std::max(peak, max_abs_field(s));
  if (peak == 0.0) {
    rep.summary.push_back("zero data: the perturbation stays identically zero");
    rep.checks.push_back(make_check("max |perturbation|", peak, "<=", 1e-12));
  } else {
    rep.summary.push_back("decay fit over the second half: rate " + fmt(r.decay_rate) + ", R^2 " +
                          fmt(r.decay_r2));
    rep.summary.push_back("weighted state norm: " + fmt(r.weighted_state_norm));
    rep.checks.push_back(make_check("decay rate", r.decay_rate, ">=", cfg.iter.beta));
    rep.checks.push_back(make_check("decay fit R^2", r.decay_r2, ">=", 0.95));
  }
  rep.checks.push_back(make_check(cfg.iter.nonlinear ? "mass drift per unit time" : "mass drift (linear run)",
                                  cfg.iter.nonlinear ? cons.drift_rate : cons.max_drift, "<=",
                                  cfg.iter.nonlinear ? 1e-5 : 1e-10));
  rep.exit_code = status_code(r.status);
}

void run_spectrum_mode(const RunConfig& cfg, Writer& w, RunReport& rep) {
  const Grid2D g(cfg.L, cfg.H, cfg.nx, cfg.ny);
  const DiffOps ops = diff_ops(g);
  AssemblyOptions opt;
  opt.rho_h1_norm = cfg.rho_h1_norm;
  const OperatorMatrix A = assemble_AFS_split(g, ops, cfg.phys, opt).full;
  std::vector<Complex> ev = spectrum(A, Domain::Xm);
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  std::ostringstream os = classic_stream();
  os << "re,im\n";
  for (const auto& z : ev) os << z.real() << "," << z.imag() << "\n";
  w.write("eigenvalues.csv", os.str());
  const double beta0 = -max_real_part(ev);
  const int kdim = kernel_dimension(A);
  rep.summary.push_back("unknowns: " + std::to_string(A.size()) + ", eigenvalues on X_m: " +
                        std::to_string(ev.size()));
  rep.summary.push_back("max Re lambda on X_m = " + fmt(-beta0));
  rep.summary.push_back("beta0 (discrete) = " + fmt(beta0));
  rep.summary.push_back("kernel dimension on the full space: " + std::to_string(kdim));
  rep.checks.push_back(make_check("max Re lambda on X_m", -beta0, "<", 0.0));
  rep.checks.push_back(make_check("kernel dimension", kdim, "==", static_cast<double>(A.constraints.size())));
}

void run_sector_mode(const RunConfig& cfg, Writer& w, RunReport& rep) {
  const Grid2D g(cfg.L, cfg.H, cfg.nx, cfg.ny);
  const DiffOps ops = diff_ops(g);
  AssemblyOptions opt;
  opt.rho_h1_norm = cfg.rho_h1_norm;
  OperatorSplit split;
  OperatorMatrix op;
  if (cfg.sector_target == SectorTarget::plate) {
    op = plate_operator(g, ops);
  } else {
    split = assemble_AFS_split(g, ops, cfg.phys, opt);
    op = cfg.sector_target == SectorTarget::afs ? split.full : split.a0;
  }
  ScanOptions sopt;
  sopt.seed = cfg.seed;
  SectorScanResult scan;
  if (cfg.gamma < 0.0) {
    const GammaSearch gs = find_gamma(op, cfg.sector_beta, cfg.radii, cfg.sector_cap, 0.01, 20, sopt);
    scan = gs.scan;
    rep.summary.push_back("gamma search: " + std::string(gs.found ? "found" : "not found") + " after " +
                          std::to_string(gs.attempts) + " attempts");
    rep.checks.push_back(make_check("gamma found", gs.found, "==", 1));
  } else {
    scan = sector_scan(op, cfg.sector_beta, cfg.radii, cfg.gamma, sopt);
  }
  std::ostringstream os = classic_stream();
  os << "re,im,phi,radius,bound,singular\n";
  for (const auto& s : scan.samples)
    os << s.lambda.real() << "," << s.lambda.imag() << "," << s.phi << "," << s.radius << "," << s.bound
       << "," << (s.singular ? 1 : 0) << "\n";
  w.write("sector.csv", os.str());
  rep.summary.push_back("operator: " + op.label);
  rep.summary.push_back("beta = " + fmt(scan.beta) + ", gamma = " + fmt(scan.gamma));
  rep.summary.push_back("M_hat_beta = " + fmt(scan.M_hat));
  rep.checks.push_back(make_check("singular samples", scan.singular_count, "==", 0));
  rep.checks.push_back(make_check("M_hat_beta", scan.M_hat, "<=", cfg.sector_cap));

  const Complex far(1e4, 0.0);
  const double asym = scaled_resolvent_norm(op, far, far, sopt);
  rep.summary.push_back("|lambda (lambda - A)^{-1}| at lambda = 1e4: " + fmt(asym));
  rep.checks.push_back(make_check("| |lambda R(lambda)| - 1 | at 1e4", std::abs(asym - 1.0), "<=", 0.1));

  if (cfg.sector_target == SectorTarget::afs) {
    const PerturbationReport pr = perturbation_check(split.a0, split.b, scan.M_hat, cfg.seed);
    rep.summary.push_back("perturbation fit |Bx| <= a |A0 x| + b |x|: a = " + fmt(pr.a) + ", b = " + fmt(pr.b) +
                          ", a M_hat^2 = " + fmt(pr.a * pr.M_hat * pr.M_hat));
    rep.summary.push_back(std::string("perturbation condition a M_hat^2 < 1: ") +
                          (pr.condition ? "holds" : "does not hold"));
  }
}

void run_convergence_mode(const RunConfig& cfg, Writer& w, RunReport& rep) {
  std::ostringstream os = classic_stream();
  os << "stepper,kind,resolution,error,order\n";
  auto study = [&](StepperId id, const std::vector<int>& res, double target) {
    const ConvergenceStudy s = manufactured_convergence(id, res, cfg.phys);
    for (size_t i = 0; i < s.errors.size(); ++i) {
      os << to_string(id) << "," << s.kind << "," << s.resolutions[i] << "," << s.errors[i] << ",";
      if (i >= 1) os << s.orders[i - 1];
      os << "\n";
    }
    std::string line = to_string(id) + " (" + s.kind + "): orders";
    for (double o : s.orders) line += " " + fmt(o);
    rep.summary.push_back(line);
    const double last = s.orders.empty() ? 0.0 : s.orders.back();
    rep.checks.push_back(make_check(to_string(id) + " observed order deviation from " + fmt(target),
                                    std::abs(last - target), "<=", 0.2));
  };
  study(StepperId::heat, cfg.resolutions, 2.0);
  study(StepperId::velocity, cfg.resolutions, 2.0);
  study(StepperId::plate, cfg.plate_steps, 1.0);
  w.write("convergence.csv", os.str());
  const double derr = density_closed_form_error(cfg.resolutions.front(), 1e-2, 10);
  rep.summary.push_back("density closed form, worst per-step error: " + fmt(derr));
  rep.checks.push_back(make_check("density per-step error", derr, "<=", 1e-8));
}

}  // namespace

RunReport run_scenario(const RunConfig& cfg) {
  RunReport rep;
  rep.mode = cfg.mode;
  rep.config_echo = print_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(cfg.output_dir);
  Writer w(dir, rep);
  try {
    fs::create_directories(dir);
    switch (cfg.mode) {
      case RunMode::local: run_local_mode(cfg, w, rep); break;
      case RunMode::global: run_global_mode(cfg, w, rep); break;
      case RunMode::spectrum: run_spectrum_mode(cfg, w, rep); break;
      case RunMode::sector: run_sector_mode(cfg, w, rep); break;
      case RunMode::convergence: run_convergence_mode(cfg, w, rep); break;
    }
    if (rep.exit_code == exit_pass && !rep.pass()) rep.exit_code = exit_numerical;
  } catch (const DiffeoFailure& e) {
    rep.exit_code = exit_diffeo;
    rep.error = std::string(e.what()) + " (node " + std::to_string(e.node()) + ", det " + fmt(e.delta()) + ")";
  } catch (const std::exception& e) {
    rep.exit_code = exit_code_for(e);
    rep.error = e.what();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.summary.insert(rep.summary.begin(), "output directory: " + dir.string());
  try {
    fs::create_directories(dir);
    std::ofstream f(dir / "report.txt", std::ios::binary);
    f << rep.to_text();
  } catch (const std::exception& e) {
    if (rep.error.empty()) rep.error = std::string("cannot write report: ") + e.what();
    if (rep.exit_code == exit_pass) rep.exit_code = exit_numerical;
  }
  return rep;
}

}  // namespace fsilab

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fsilab/errors.hpp"
#include "fsilab/fixed_point.hpp"
#include "fsilab/fs_operator.hpp"
#include "fsilab/run.hpp"
#include "metric_oracle.hpp"
#include "support.hpp"

using namespace fsilab;

namespace tol {
constexpr double steady_max = 1e-12;
constexpr double steady_seconds = 10.0;
constexpr double metric_rel = 1e-8;
constexpr double plate_rel = 1e-13;
constexpr double beta_variation = 0.25;
constexpr double spectrum_seconds = 120.0;
constexpr double slope = 2.0, slope_band = 0.1;
constexpr double decay_fraction = 0.5;
constexpr double decay_r2 = 0.95;
constexpr double order = 2.0, order_band = 0.2;
constexpr double density_closed = 1e-8;
constexpr double local_drift_rate = 1e-5;
constexpr double global_linear_drift = 1e-10;
constexpr double asymptote = 0.1;
constexpr double sector_cap = 50.0;
constexpr double sector_beta = 2.0;
}  // namespace tol

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
double beta0_cache = 0.0;

void criterion(int n, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("Criterion %d: %s  %s | %s (%.2f s)\n", n, o.pass ? "PASS" : "FAIL", title.c_str(),
              o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double beta0_at(int n) {
  const Grid2D g(1.0, 1.0, n, n);
  const OperatorMatrix A = assemble_AFS(g, PhysParams{});
  return -max_real_part(spectrum(A, Domain::Xm));
}

}  // namespace

int main() {
  const PhysParams p;

  criterion(1, "steady state preserved (nx=32, 1000 global steps)", [&] {
    const Grid2D g(1.0, 1.0, 32, 32);
    const DiffOps ops = diff_ops(g);
    IterationConfig c;
    c.T = 1.0;
    c.dt = 1e-3;
    c.beta = 0.05;
    const auto t0 = Clock::now();
    const RunResult r = run_global(g, ops, p, FullState::zeros(g), c);
    const double secs = seconds_since(t0);
    double m = 0.0;
    for (const auto& s : r.trajectory.states) m = std::max(m, testing::max_abs(s));
    const bool ok = m <= tol::steady_max && secs < tol::steady_seconds &&
                    r.trajectory.states.size() == 1001;
    return Outcome{ok, fmt("max |state| = %.3g <= %.0e, run %.2f s < %.0f s", m, tol::steady_max, secs,
                           tol::steady_seconds)};
  });

  criterion(2, "metric tensors against independent oracles (nx=64)", [&] {
    double worst = 0.0;
    std::ostringstream os;
    for (const auto& d : testing::metric_oracle_suite(64)) {
      worst = std::max(worst, d.worst());
      os << d.name << "=" << fmt("%.2g", d.worst()) << " ";
    }
    return Outcome{worst <= tol::metric_rel, os.str() + fmt("max %.3g <= %.0e", worst, tol::metric_rel)};
  });

  criterion(3, "unforced plate energy non-increasing (1e4 steps each)", [&] {
    const Grid2D g(1.0, 1.0, 32, 4);
    const DiffOps ops = diff_ops(g);
    const BeamField zero = BeamField::Zero(g.beam_node_count());
    int violations = 0;
    for (double dt : {1e-1, 1e-2, 1e-3}) {
      const PlateStepper plate(g, ops, dt);
      BeamField e1 = sample_beam(g, [](double x) { return 1.6 * x * x * (1 - x) * (1 - x); });
      BeamField e2 = sample_beam(g, [](double x) { return std::sin(M_PI * x) * std::sin(2 * M_PI * x); });
      double E = plate.energy(e1, e2);
      for (int n = 0; n < 10000; ++n) {
        std::tie(e1, e2) = plate.step(e1, e2, zero);
        const double En = plate.energy(e1, e2);
        if (En > E * (1 + tol::plate_rel)) ++violations;
        E = En;
      }
    }
    return Outcome{violations == 0, fmt("violations = %.0f over dt in {1e-1,1e-2,1e-3}", violations)};
  });

  criterion(4, "spectral gap stable under refinement (nx=16, 24)", [&] {
    const auto t0 = Clock::now();
    const double b16 = beta0_at(16), b24 = beta0_at(24);
    const double secs = seconds_since(t0);
    beta0_cache = b16;
    const double var = std::abs(b16 - b24) / std::max(b16, b24);
    const bool ok = b16 > 0 && b24 > 0 && var < tol::beta_variation && secs < tol::spectrum_seconds;
    return Outcome{ok, fmt("beta0 = %.6f, %.6f, variation %.3f < %.2f", b16, b24, var, tol::beta_variation)};
  });

  criterion(5, "kernel equals the constraint count and lambda=0 is detected singular", [&] {
    const Grid2D g(1.0, 1.0, 12, 12);
    const OperatorMatrix A = assemble_AFS(g, p);
    const int k = kernel_dimension(A);
    bool singular = false;
    try {
      Resolvent R(A, Complex(0.0, 0.0));
    } catch (const SolverError&) {
      singular = true;
    }
    double left = 0.0;
    const double scale = Eigen::MatrixXd(A.A).cwiseAbs().maxCoeff();
    for (const auto& ell : A.constraints)
      left = std::max(left, (A.A.transpose() * ell).cwiseAbs().maxCoeff() / (scale * ell.cwiseAbs().maxCoeff()));
    OperatorMatrix xm = A;
    xm.domain = Domain::Xm;
    const double cond = Resolvent(xm, Complex(0.0, 0.0)).condition_estimate();
    const bool ok = k == static_cast<int>(A.constraints.size()) && singular && left < 1e-12 && cond < 1e13;
    return Outcome{ok, fmt("kernel %.0f == %.0f constraints, singular flag %.0f, |A^T ell| %.2g", k,
                           static_cast<double>(A.constraints.size()), singular, left)};
  });

  criterion(6, "local iteration contracts as T shrinks (nx=32, T=0.08 and 3 halvings)", [&] {
    const Grid2D g(1.0, 1.0, 32, 32);
    const DiffOps ops = diff_ops(g);
    const FullState init = testing::mixed_with_norm(g, ops, p, Mode::local, 1e-2);
    std::vector<double> first;
    bool all_below = true, converged = true;
    for (double T : {0.08, 0.04, 0.02, 0.01}) {
      IterationConfig c;
      c.T = T;
      c.dt = 1e-3;
      const RunResult r = run_local(g, ops, p, init, c);
      converged = converged && r.report.status == IterationStatus::converged;
      for (double q : r.report.ratios) all_below = all_below && q < 1.0;
      first.push_back(r.report.ratios.empty() ? 0.0 : r.report.ratios.front());
    }
    bool monotone = true;
    for (size_t i = 1; i < first.size(); ++i) monotone = monotone && first[i] <= first[i - 1];
    return Outcome{converged && all_below && monotone,
                   fmt("first ratios %.4f %.4f %.4f %.4f, all < 1 and non-increasing", first[0], first[1],
                       first[2], first[3])};
  });

  criterion(7, "nonlinear sources are quadratic in the data", [&] {
    const Grid2D g(1.0, 1.0, 16, 16);
    const DiffOps ops = diff_ops(g);
    const double n1 = data_norm(g, ops, testing::mixed_perturbation(g, 1.0), Mode::global, 4.0);
    std::vector<double> xs, ys;
    for (double sc : {1.0, 0.5, 0.25, 0.125}) {
      IterationConfig c;
      c.T = 1.0;
      c.dt = 0.01;
      c.beta = 0.09;
      c.max_iters = 1;
      const RunResult r = run_global(g, ops, p, testing::mixed_perturbation(g, 0.1 * sc / n1), c);
      xs.push_back(std::log(sc));
      ys.push_back(std::log(r.report.bundle_norms.front()));
    }
    double lo = 1e9, hi = -1e9;
    for (size_t i = 1; i < xs.size(); ++i) {
      const double s = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const bool ok = std::abs(lo - tol::slope) <= tol::slope_band && std::abs(hi - tol::slope) <= tol::slope_band;
    return Outcome{ok, fmt("log-log slopes in [%.4f, %.4f], target %.1f +- %.1f", lo, hi, tol::slope, tol::slope_band)};
  });

  criterion(8, "small data decay exponentially (nx=16, T=20)", [&] {
    const Grid2D g(1.0, 1.0, 16, 16);
    const DiffOps ops = diff_ops(g);
    const double b0 = beta0_cache > 0 ? beta0_cache : beta0_at(16);
    IterationConfig c;
    c.T = 20.0;
    c.dt = 0.02;
    c.beta = tol::decay_fraction * b0;
    const RunResult r = run_global(g, ops, p, testing::mixed_with_norm(g, ops, p, Mode::global, 1e-2), c);
    const bool ok = r.report.status == IterationStatus::converged &&
                    r.report.decay_rate >= tol::decay_fraction * b0 && r.report.decay_r2 >= tol::decay_r2;
    return Outcome{ok, fmt("rate %.4f >= %.4f, R^2 %.5f >= %.2f", r.report.decay_rate, tol::decay_fraction * b0,
                           r.report.decay_r2, tol::decay_r2)};
  });

  criterion(9, "manufactured convergence orders", [&] {
    const ConvergenceStudy heat = manufactured_convergence(StepperId::heat, {16, 32, 64});
    const ConvergenceStudy vel = manufactured_convergence(StepperId::velocity, {16, 32, 64});
    const double dens = density_closed_form_error(32, 1e-2, 50);
    bool ok = dens <= tol::density_closed;
    double lo = 1e9, hi = -1e9;
    for (const auto* s : {&heat, &vel})
      for (double o : s->orders) {
        lo = std::min(lo, o);
        hi = std::max(hi, o);
        ok = ok && std::abs(o - tol::order) <= tol::order_band;
      }
    return Outcome{ok, fmt("heat/velocity orders in [%.4f, %.4f], density error %.2g <= %.0e", lo, hi, dens,
                           tol::density_closed)};
  });

  criterion(10, "mass conservation", [&] {
    const Grid2D g(1.0, 1.0, 32, 32);
    const DiffOps ops = diff_ops(g);
    IterationConfig c;
    c.T = 0.04;
    c.dt = 1e-3;
    const RunResult loc = run_local(g, ops, p, testing::mixed_with_norm(g, ops, p, Mode::local, 1e-2), c);
    const double rate = conserved_quantities(g, ops, loc.trajectory, p).drift_rate;
    const Grid2D h(1.0, 1.0, 16, 16);
    const DiffOps hops = diff_ops(h);
    IterationConfig gc;
    gc.T = 20.0;
    gc.dt = 0.02;
    gc.beta = 0.09;
    gc.nonlinear = false;
    const RunResult glob = run_global(h, hops, p, testing::mixed_with_norm(h, hops, p, Mode::global, 1e-2), gc);
    const double drift = conserved_quantities(h, hops, glob.trajectory, p).max_drift;
    const bool ok = rate <= tol::local_drift_rate && drift <= tol::global_linear_drift;
    return Outcome{ok, fmt("local drift %.3g per unit time <= %.0e, global linear drift %.3g <= %.0e", rate,
                           tol::local_drift_rate, drift, tol::global_linear_drift)};
  });

  criterion(11, "resolvent asymptote |lambda R(lambda)| -> 1 and sector scan", [&] {
    const Grid2D g(1.0, 1.0, 12, 12);
    const DiffOps ops = diff_ops(g);
    const OperatorSplit split = assemble_AFS_split(g, ops, p);
    OperatorMatrix afs = split.full, a0 = split.a0;
    afs.domain = a0.domain = Domain::Xm;
    const OperatorMatrix plate = plate_operator(g, ops);
    bool ok = true;
    std::ostringstream os;
    for (const OperatorMatrix* op : std::initializer_list<const OperatorMatrix*>{&afs, &a0, &plate}) {
      double worst = 0.0;
      for (double phi : {0.0, 1.0, tol::sector_beta - 0.05})
        for (double sgn : {1.0, -1.0}) {
          const Complex lam = std::polar(1e4, sgn * phi);
          worst = std::max(worst, std::abs(scaled_resolvent_norm(*op, lam, lam) - 1.0));
        }
      const GammaSearch gs = find_gamma(*op, tol::sector_beta, {0.01, 0.1, 1.0, 10.0, 100.0}, tol::sector_cap);
      ok = ok && worst <= tol::asymptote && gs.found && gs.scan.singular_count == 0;
      os << op->label << ": asym " << fmt("%.2g", worst) << " gamma " << gs.gamma << " M " << fmt("%.3g", gs.scan.M_hat)
         << "; ";
    }
    return Outcome{ok, os.str() + fmt("tolerance %.2f, cap %.0f", tol::asymptote, tol::sector_cap)};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}

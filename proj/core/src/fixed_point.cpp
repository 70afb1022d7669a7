#include "fsilab/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <Eigen/SparseLU>

#include "fsilab/errors.hpp"
#include "fsilab/fs_operator.hpp"

namespace fsilab {

int IterationConfig::steps() const { return static_cast<int>(std::lround(T / dt)); }

std::vector<std::string> violations(const IterationConfig& cfg, Mode mode) {
  std::vector<std::string> out;
  if (!(cfg.T > 0.0)) out.push_back("T must be positive");
  if (!(cfg.dt > 0.0)) out.push_back("dt must be positive");
  if (!(cfg.tol > 0.0)) out.push_back("tol must be positive");
  if (!(cfg.abs_tol >= 0.0)) out.push_back("abs_tol must be non-negative");
  if (cfg.max_iters < 1) out.push_back("max_iters must be at least 1");
  if (cfg.T > 0.0 && cfg.dt > 0.0) {
    const double n = std::round(cfg.T / cfg.dt);
    if (n < 1.0 || std::abs(n * cfg.dt - cfg.T) > 1e-9 * cfg.T) out.push_back("dt must divide T");
  }
  if (!(cfg.p > 2.0) || !std::isfinite(cfg.p)) out.push_back("p must satisfy 2 < p < inf");
  if (!(cfg.q > 3.0) || !std::isfinite(cfg.q)) out.push_back("q must satisfy 3 < q < inf");
  if (std::abs(1.0 / cfg.p + 1.0 / (2.0 * cfg.q) - 0.5) < 1e-12)
    out.push_back("exponents are resonant: 1/p + 1/(2q) = 1/2");
  if (mode == Mode::global) {
    if (!(cfg.beta > 0.0)) out.push_back("global mode requires beta > 0");
    if (!(cfg.gamma1 > 0.0)) out.push_back("gamma1 must be positive");
  }
  return out;
}

void validate(const IterationConfig& cfg, Mode mode) {
  const auto v = violations(cfg, mode);
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid iteration config:";
  for (const auto& s : v) os << "\n  - " << s;
  throw ConfigError(os.str());
}

std::string to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::converged: return "converged";
    case IterationStatus::ball_exit: return "ball-exit";
    case IterationStatus::diffeo_failure: return "diffeo-failure";
    case IterationStatus::max_iters: return "max-iters";
  }
  return "unknown";
}

double data_norm(const Grid2D& g, const DiffOps& ops, const FullState& s, Mode mode, double q) {
  const NormSpec w1{1, q, 2.0, 0.0}, w2{2, q, 2.0, 0.0};
  ScalarField rho = s.rho, theta = s.theta;
  if (mode == Mode::local) {
    rho.array() -= mean(g, rho);
    theta.array() -= mean(g, theta);
  }
  return discrete_norm(g, ops, rho, w1) + discrete_norm(g, ops, s.v, w1) +
         discrete_norm(g, ops, theta, w1) + discrete_beam_norm(g, ops, s.eta1, w2) +
         discrete_beam_norm(g, ops, s.eta2, w1);
}

namespace {

double boundary_norm(const Grid2D& g, const BoundaryField& f, double q) {
  const auto& faces = g.boundary_faces();
  double s = 0.0;
  for (size_t i = 0; i < faces.size(); ++i)
    s += faces[i].length * std::pow(std::abs(f[static_cast<Eigen::Index>(i)]), q);
  return std::pow(s, 1.0 / q);
}

}  // namespace

double bundle_norm(const Grid2D& g, const DiffOps& ops, const SourceBundle& b, const NormSpec& spec) {
  const size_t n = b.f1.size();
  if (n == 0) return 0.0;
  const NormSpec w1{1, spec.q, spec.p, spec.beta}, l{0, spec.q, spec.p, spec.beta};
  std::vector<double> s1(n), s2(n), s3(n), sg(n), sh(n);
  for (size_t i = 0; i < n; ++i) {
    s1[i] = discrete_norm(g, ops, b.f1[i], w1);
    s2[i] = discrete_norm(g, ops, b.f2[i], l);
    s3[i] = discrete_norm(g, ops, b.f3[i], l);
    sg[i] = boundary_norm(g, b.g[i], spec.q);
    sh[i] = discrete_beam_norm(g, ops, b.h[i], l);
  }
  return weighted_time_norm(s1, b.dt, spec) + weighted_time_norm(s2, b.dt, spec) +
         weighted_time_norm(s3, b.dt, spec) + weighted_time_norm(sg, b.dt, spec) +
         weighted_time_norm(sh, b.dt, spec);
}

SourceBundle bundle_difference(const SourceBundle& a, const SourceBundle& b) {
  SourceBundle d = a;
  for (size_t i = 0; i < a.f1.size(); ++i) {
    d.f1[i] -= b.f1[i];
    d.f2[i] = a.f2[i] - b.f2[i];
    d.f3[i] -= b.f3[i];
    d.g[i] -= b.g[i];
    d.h[i] -= b.h[i];
  }
  return d;
}

namespace {

Rates rates_at(const std::vector<FullState>& st, size_t n, double dt) {
  const size_t last = st.size() - 1;
  Rates r;
  if (last == 0) {
    r.dv = VectorField::zeros(st[0].v.size());
    r.dtheta = ScalarField::Zero(st[0].theta.size());
    return r;
  }
  const size_t lo = n == 0 ? 0 : n - 1, hi = n == last ? last : n + 1;
  const double span = static_cast<double>(hi - lo) * dt;
  r.dv = (1.0 / span) * (st[hi].v - st[lo].v);
  r.dtheta = (st[hi].theta - st[lo].theta) / span;
  return r;
}

void store(SourceBundle& S, size_t n, SourceSample&& s) {
  S.f1[n] = std::move(s.f1);
  S.f2[n] = std::move(s.f2);
  S.f3[n] = std::move(s.f3);
  S.g[n] = std::move(s.g);
  S.h[n] = std::move(s.h);
}

DiffeoMap initial_map(const Grid2D& g, const DiffOps& ops, const FullState& s,
                      const IterationConfig& cfg) {
  const CutoffProfile chi = make_cutoff(g, cfg.cutoff_lower * g.depth(),
                                        cfg.cutoff_upper * g.depth(), cfg.cutoff_epsilon);
  return initial_diffeo(g, ops, s.eta1, chi, cfg.flow_steps);
}

void require_compatible(const CompatibilityReport& rep) {
  if (rep.pass()) return;
  std::ostringstream os;
  os << "initial data fail compatibility:";
  for (const auto& c : rep.checks)
    if (c.applies && !c.pass) os << "\n  - " << c.name << " (residual " << c.residual << ", tol " << c.tolerance << ")";
  throw ConfigError(os.str());
}

double ball_radius(const IterationConfig& cfg, double init) {
  if (cfg.R > 0.0) return cfg.R;
  return init > 0.0 ? std::min(10.0 * init, 1.0) : 1.0;
}

// Bookkeeping shared by both drivers: norms, ratios, stopping rule.
bool record(IterationReport& rep, double bn, double dn, double tol, double abs_tol) {
  rep.bundle_norms.push_back(bn);
  rep.diff_norms.push_back(dn);
  const size_t k = rep.diff_norms.size();
  if (k >= 2 && rep.diff_norms[k - 2] > 0.0) rep.ratios.push_back(dn / rep.diff_norms[k - 2]);
  if (bn > rep.R) {
    rep.status = IterationStatus::ball_exit;
    std::ostringstream os;
    os << "bundle norm " << bn << " left the ball of radius " << rep.R << "; try a smaller T";
    rep.message = os.str();
    return true;
  }
  if (dn <= tol * bn || dn <= abs_tol) {
    rep.status = IterationStatus::converged;
    return true;
  }
  return false;
}

}  // namespace

RunResult run_local(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                    const FullState& initial, const IterationConfig& cfg, const SourceBundle* guess) {
  validate(cfg, Mode::local);
  validate(p, false);
  const int N = cfg.steps();
  const double dt = cfg.dt;
  const DiffeoMap X0 = initial_map(g, ops, initial, cfg);
  const double c0 = cfg.c0 > 0.0 ? cfg.c0 : default_c0(X0);
  const DiffeoCertificate cert = check_diffeo(X0, c0);
  if (!cert.pass)
    throw DiffeoFailure("initial map fails the diffeomorphism check", cert.worst_node, cert.min_delta);
  require_compatible(check_compatibility(g, ops, initial, X0, p, Mode::local, cfg.p, cfg.q));
  const Metrics m0 = X0.metrics();
  const ScalarField rho0 = initial.rho;

  RunResult out;
  IterationReport& rep = out.report;
  rep.T = cfg.T;
  rep.initial_norm = data_norm(g, ops, initial, Mode::local, cfg.q);
  rep.R = ball_radius(cfg, rep.initial_norm);
  if (rep.initial_norm > rep.R)
    throw ConfigError("initial data norm exceeds the ball radius R");

  const PlateStepper plate(g, ops, dt, cfg.scheme);
  const VelocityStepper vel(g, ops, p, m0, rho0, dt, cfg.scheme);
  const TemperatureStepper heat(g, ops, p, m0, rho0, dt, 0.0, cfg.scheme);
  const NormSpec spec{0, cfg.q, cfg.p, 0.0};

  SourceBundle S = guess ? *guess : SourceBundle::zeros(g, N, dt);
  if (static_cast<int>(S.steps()) != N) throw ConfigError("initial bundle guess has the wrong length");
  Trajectory tr;
  tr.mode = Mode::local;
  tr.dt = dt;
  tr.rho_bar = p.rho_bar;

  for (int k = 0; k < cfg.max_iters; ++k) {
    rep.iterations = k + 1;
    tr.states.assign(1, initial);
    tr.delta.assign(1, X0.delta);
    for (int n = 0; n < N; ++n) {
      const FullState& s = tr.states.back();
      FullState next;
      next.t = (n + 1) * dt;
      std::tie(next.eta1, next.eta2) = plate.step(s.eta1, s.eta2, step_source(S.h, n, cfg.scheme));
      next.v = vel.step(s.v, s.eta2, next.eta2, step_source(S.f2, n, cfg.scheme));
      next.theta = heat.step(s.theta, step_source(S.f3, n, cfg.scheme), step_source(S.g, n, cfg.scheme));
      next.rho = step_density(ops, s.rho, s.v, next.v, S.f1[n], S.f1[n + 1], m0, rho0, dt);
      tr.states.push_back(std::move(next));
    }

    SourceBundle S_new = SourceBundle::zeros(g, N, dt);
    try {
      MapTracker map(ops, X0, c0);
      for (int n = 0; n <= N; ++n) {
        if (n > 0) {
          map.advance(tr.states[n - 1].v, tr.states[n].v, dt);
          tr.delta.push_back(map.current().delta);
        }
        if (!cfg.nonlinear) continue;
        store(S_new, n, eval_local_sources(g, ops, tr.states[n], map.current(), m0, rho0, p,
                                           rates_at(tr.states, n, dt)));
      }
    } catch (const DiffeoFailure& e) {
      rep.status = IterationStatus::diffeo_failure;
      rep.message = e.what();
      break;
    }
    const double bn = bundle_norm(g, ops, S_new, spec);
    const double dn = bundle_norm(g, ops, bundle_difference(S_new, S), spec);
    out.bundle = S;
    const bool stop = record(rep, bn, dn, cfg.tol, cfg.abs_tol);
    S = std::move(S_new);
    if (stop) break;
  }
  if (rep.status == IterationStatus::max_iters && rep.message.empty())
    rep.message = "no convergence within max_iters";
  out.trajectory = std::move(tr);
  return out;
}

BisectionResult run_local_bisect(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                                 const FullState& initial, IterationConfig cfg, int max_halvings) {
  BisectionResult out;
  for (int h = 0; h <= max_halvings; ++h) {
    out.horizons.push_back(cfg.T);
    out.result = run_local(g, ops, p, initial, cfg);
    out.statuses.push_back(out.result.report.status);
    if (out.result.report.status == IterationStatus::converged) {
      out.existence_time = cfg.T;
      return out;
    }
    if (out.result.report.status == IterationStatus::diffeo_failure && h == max_halvings) break;
    cfg.T *= 0.5;
  }
  return out;
}

double dynamic_norm(const Grid2D& g, const FullState& s) {
  const Eigen::VectorXd& W = g.weights();
  const double rm = mean(g, s.rho), tm = mean(g, s.theta);
  double acc = 0.0;
  for (int k = 0; k < g.node_count(); ++k)
    acc += W[k] * ((s.rho[k] - rm) * (s.rho[k] - rm) + s.v.x[k] * s.v.x[k] + s.v.y[k] * s.v.y[k] +
                   (s.theta[k] - tm) * (s.theta[k] - tm));
  acc += integrate_beam(g, s.eta2.cwiseAbs2());
  return std::sqrt(acc);
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
  std::vector<double> xs, ls;
  for (size_t i = 0; i < t.size() && i < y.size(); ++i)
    if (t[i] >= t_from && y[i] > 0.0 && std::isfinite(y[i])) {
      xs.push_back(t[i]);
      ls.push_back(std::log(y[i]));
    }
  DecayFit f;
  if (xs.size() < 3) return f;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ls[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ls[i] - my);
    syy += (ls[i] - my) * (ls[i] - my);
  }
  const double slope = sxy / sxx;
  f.rate = -slope;
  f.r2 = syy > 0.0 ? (slope * sxy) / syy : 1.0;
  return f;
}

RunResult run_global(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                     const FullState& initial, const IterationConfig& cfg) {
  validate(cfg, Mode::global);
  validate(p, true);
  const int N = cfg.steps();
  const double dt = cfg.dt;
  const double th = implicit_weight(cfg.scheme);
  const DiffeoMap X0 = initial_map(g, ops, initial, cfg);
  const double c0 = cfg.c0 > 0.0 ? cfg.c0 : default_c0(X0);
  const DiffeoCertificate cert = check_diffeo(X0, c0);
  if (!cert.pass)
    throw DiffeoFailure("initial map fails the diffeomorphism check", cert.worst_node, cert.min_delta);
  require_compatible(check_compatibility(g, ops, initial, X0, p, Mode::global, cfg.p, cfg.q));

  RunResult out;
  IterationReport& rep = out.report;
  rep.T = cfg.T;
  rep.initial_norm = data_norm(g, ops, initial, Mode::global, cfg.q);
  rep.R = ball_radius(cfg, rep.initial_norm);
  if (rep.initial_norm > rep.R)
    throw ConfigError("initial data norm exceeds the ball radius R");

  const OperatorMatrix A = assemble_AFS_split(g, ops, p).full;
  const BlockLayout& L = A.layout;
  SparseMatrix I(L.size, L.size);
  I.setIdentity();
  Eigen::SparseLU<SparseMatrix> lu(SparseMatrix(I - th * dt * A.A));
  if (lu.info() != Eigen::Success) throw SolverError("global march: factorization failed");
  const Eigen::VectorXd& W = g.weights();
  const double wsum = W.sum();
  const NormSpec spec{0, cfg.q, cfg.p, cfg.beta};
  GlobalSourceOptions gopt;
  gopt.shear = cfg.shear;

  // Right-hand side of the coupled system for one source sample.
  auto source_vector = [&](const SourceBundle& S, int n) {
    FullState s = FullState::zeros(g);
    s.rho = S.f1[n];
    s.v = S.f2[n];
    s.theta = S.f3[n] + p.kappa_bar() * boundary_load(g, S.g[n]).cwiseQuotient(W);
    s.eta2 = S.h[n];
    Eigen::VectorXd x = pack(g, L, s);
    x.segment(L.eta2, L.n_beam) = beam_interior(S.h[n]);
    return x;
  };

  SourceBundle S = SourceBundle::zeros(g, N, dt);
  Trajectory tr;
  tr.mode = Mode::global;
  tr.dt = dt;
  tr.rho_bar = p.rho_bar;

  for (int k = 0; k < cfg.max_iters; ++k) {
    rep.iterations = k + 1;
    tr.states.assign(1, initial);
    tr.states[0].t = 0.0;
    tr.theta_flat.assign(1, 0.0);
    Eigen::VectorXd x = pack(g, L, initial);
    double m_sharp = mean(g, initial.theta);
    Eigen::VectorXd s_old = source_vector(S, 0);
    for (int n = 0; n < N; ++n) {
      const Eigen::VectorXd s_new = source_vector(S, n + 1);
      const Eigen::VectorXd s_step = th * s_new + (1.0 - th) * s_old;
      Eigen::VectorXd rhs = x + dt * s_step;
      if (th < 1.0) rhs += (1.0 - th) * dt * (A.A * x);
      x = lu.solve(rhs);
      if (!x.allFinite()) throw NumericalError("global march produced non-finite values");
      // Mean-temperature split: d m/dt = -gamma1 m + avg source, theta_flat' = gamma1 m.
      const double avg = W.dot(s_step.segment(L.theta, L.n_nodes)) / wsum;
      const double m_new = (m_sharp * (1.0 - (1.0 - th) * cfg.gamma1 * dt) + dt * avg) /
                           (1.0 + th * cfg.gamma1 * dt);
      tr.theta_flat.push_back(tr.theta_flat.back() +
                              dt * cfg.gamma1 * (th * m_new + (1.0 - th) * m_sharp));
      m_sharp = m_new;
      FullState next = unpack(g, L, x);
      next.t = (n + 1) * dt;
      tr.states.push_back(std::move(next));
      s_old = s_new;
    }

    SourceBundle S_new = SourceBundle::zeros(g, N, dt);
    tr.delta.assign(1, X0.delta);
    try {
      MapTracker map(ops, X0, c0);
      for (int n = 0; n <= N; ++n) {
        if (n > 0) {
          map.advance(tr.states[n - 1].v, tr.states[n].v, dt);
          tr.delta.push_back(map.current().delta);
        }
        if (!cfg.nonlinear) continue;
        const FullState& s = tr.states[n];
        MeanFluctSplit th_split;
        th_split.avg = tr.theta_flat[n];
        th_split.tilde = s.theta.array() - th_split.avg;
        store(S_new, n, eval_global_sources(g, ops, s, map.current(), p, split_mean(g, s.rho),
                                            th_split, rates_at(tr.states, n, dt), gopt));
      }
    } catch (const DiffeoFailure& e) {
      rep.status = IterationStatus::diffeo_failure;
      rep.message = e.what();
      break;
    }
    const double bn = bundle_norm(g, ops, S_new, spec);
    const double dn = bundle_norm(g, ops, bundle_difference(S_new, S), spec);
    out.bundle = S;
    const bool stop = record(rep, bn, dn, cfg.tol, cfg.abs_tol);
    S = std::move(S_new);
    if (stop) break;
  }
  if (rep.status == IterationStatus::max_iters && rep.message.empty())
    rep.message = "no convergence within max_iters";

  std::vector<double> t, y;
  for (const auto& s : tr.states) {
    t.push_back(s.t);
    y.push_back(dynamic_norm(g, s));
  }
  const DecayFit fit = fit_decay(t, y, 0.5 * cfg.T);
  rep.decay_rate = fit.rate;
  rep.decay_r2 = fit.r2;
  rep.weighted_state_norm = weighted_time_norm(y, dt, spec);
  const double y_max = *std::max_element(y.begin(), y.end());
  rep.decay_violation = y_max > 0.0 && fit.rate < cfg.beta;
  out.trajectory = std::move(tr);
  return out;
}

ConservedSeries conserved_quantities(const Grid2D& g, const DiffOps& ops, const Trajectory& tr,
                                     const PhysParams& p) {
  ConservedSeries c;
  const Eigen::VectorXd& W = g.weights();
  const double h = g.hx();
  for (size_t n = 0; n < tr.states.size(); ++n) {
    const FullState& s = tr.states[n];
    const Eigen::VectorXd e1 = beam_interior(s.eta1);
    const double plate = 0.5 * h * (s.eta2.squaredNorm() + e1.dot(ops.beam_bilaplacian * e1));
    const ScalarField delta = n < tr.delta.size() ? tr.delta[n] : ScalarField::Ones(g.node_count());
    double mass = 0.0, energy = plate;
    if (tr.mode == Mode::local) {
      const Eigen::ArrayXd rd = s.rho.array() * delta.array();
      mass = W.dot(rd.matrix());
      energy += 0.5 * W.dot((rd * (s.v.x.array().square() + s.v.y.array().square())).matrix());
    } else {
      mass = integrate(g, s.rho) + p.rho_bar * integrate_beam(g, s.eta1);
      energy += 0.5 * (p.R0 * p.theta_bar / p.rho_bar * W.dot(s.rho.cwiseAbs2()) +
                       p.rho_bar * (W.dot(s.v.x.cwiseAbs2()) + W.dot(s.v.y.cwiseAbs2())) +
                       W.dot(s.theta.cwiseAbs2()));
    }
    c.t.push_back(s.t);
    c.mass.push_back(mass);
    c.energy.push_back(energy);
    c.max_drift = std::max(c.max_drift, std::abs(mass - c.mass.front()));
  }
  const double horizon = c.t.empty() ? 0.0 : c.t.back() - c.t.front();
  c.drift_rate = horizon > 0.0 ? c.max_drift / horizon : 0.0;
  return c;
}

}  // namespace fsilab

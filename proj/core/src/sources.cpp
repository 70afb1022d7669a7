#include "fsilab/sources.hpp"

#include <cmath>

namespace fsilab {

FullState FullState::zeros(const Grid2D& g) {
  FullState s;
  s.rho = ScalarField::Zero(g.node_count());
  s.v = VectorField::zeros(g.node_count());
  s.theta = ScalarField::Zero(g.node_count());
  s.eta1 = BeamField::Zero(g.beam_node_count());
  s.eta2 = BeamField::Zero(g.beam_node_count());
  return s;
}

MeanFluctSplit split_mean(const Grid2D& g, const ScalarField& f) {
  MeanFluctSplit s;
  s.avg = mean(g, f);
  s.tilde = f.array() - s.avg;
  return s;
}

bool CompatibilityReport::pass() const {
  for (const auto& c : checks)
    if (c.applies && !c.pass) return false;
  return true;
}

namespace {

Eigen::VectorXd stack(const VectorField& v) {
  Eigen::VectorXd out(2 * v.size());
  out << v.x, v.y;
  return out;
}

FluxTensor difference(const FluxTensor& a, const FluxTensor& b) {
  FluxTensor d;
  for (size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Control-volume averaged div of the stress increment between two metric sets.
VectorField stress_increment_divergence(const Grid2D& g, const DiffOps& ops, const VectorField& v,
                                        const MatrixField& A1, const MatrixField& B1,
                                        const Eigen::VectorXd& d1, const MatrixField& A0,
                                        const MatrixField& B0, const Eigen::VectorXd& d0,
                                        const PhysParams& p) {
  const int n = g.node_count();
  std::vector<FluxTensor> C(n);
  for (int k = 0; k < n; ++k)
    C[k] = difference(stress_tensor(A1[k], B1[k], d1[k], p.mu, p.alpha),
                      stress_tensor(A0[k], B0[k], d0[k], p.mu, p.alpha));
  const Eigen::VectorXd div = apply_flux_divergence(g, ops, 2, C, stack(v));
  return {div.head(n).cwiseQuotient(g.weights()), div.tail(n).cwiseQuotient(g.weights())};
}

// Control-volume averaged div((A1 - A0) grad theta) including boundary faces,
// and the conormal defect (A0 - A1) grad theta . n on every boundary face.
std::pair<ScalarField, BoundaryField> conormal_increment(const Grid2D& g, const DiffOps& ops,
                                                         const ScalarField& theta,
                                                         const MatrixField& A1,
                                                         const MatrixField& A0) {
  const int n = g.node_count();
  std::vector<FluxTensor> C(n);
  MatrixField defect(n);
  for (int k = 0; k < n; ++k) {
    C[k] = conormal_tensor(A1[k] - A0[k]);
    defect[k] = A0[k] - A1[k];
  }
  BoundaryField G = conormal_flux(g, ops, defect, theta);
  ScalarField div =
      (apply_flux_divergence(g, ops, 1, C, theta) - boundary_load(g, G)).cwiseQuotient(g.weights());
  return {std::move(div), std::move(G)};
}

double contract(const Matrix2& a, const Matrix2& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

SourceSample eval_local_sources(const Grid2D& g, const DiffOps& ops, const FullState& s,
                                const DiffeoMap& map, const Metrics& m0, const ScalarField& rho0,
                                const PhysParams& p, const Rates& rates) {
  const int n = g.node_count();
  const MatrixField G = gradient(ops, s.v);
  const ScalarField rt = s.rho.cwiseProduct(s.theta);
  const VectorField grad_rt = gradient(ops, rt);
  const bool have_dv = rates.dv.size() == n, have_dth = rates.dtheta.size() == n;

  SourceSample out;
  out.f1.resize(n);
  out.f2 = stress_increment_divergence(g, ops, s.v, map.A, map.B, map.delta, m0.A, m0.B, m0.delta, p);
  out.f3.resize(n);
  auto [div_heat, G_faces] = conormal_increment(g, ops, s.theta, map.A, m0.A);
  out.g = std::move(G_faces);

  for (int k = 0; k < n; ++k) {
    const Matrix2& B = map.B[k];
    const double d = map.delta[k];
    const double w0 = rho0[k] * m0.delta[k];
    const double mass_defect = w0 - s.rho[k] * d;
    const double trBG = contract(B, G[k]);
    out.f1[k] = rho0[k] / m0.delta[k] * contract(m0.B[k], G[k]) - s.rho[k] / d * trBG;

    const Eigen::Vector2d press = p.R0 * B * Eigen::Vector2d(grad_rt.x[k], grad_rt.y[k]);
    Eigen::Vector2d f2(out.f2.x[k], out.f2.y[k]);
    if (have_dv) f2 += mass_defect * Eigen::Vector2d(rates.dv.x[k], rates.dv.y[k]);
    f2 -= press;
    out.f2.x[k] = f2.x() / w0;
    out.f2.y[k] = f2.y() / w0;

    const Matrix2 S = G[k] * B.transpose() + B * G[k].transpose();
    double f3 = p.kappa * div_heat[k] + p.alpha / d * trBG * trBG +
                p.mu / (2.0 * d) * S.squaredNorm() - (p.R0 * rt[k] + p.pi0) * trBG;
    if (have_dth) f3 += p.cv * mass_defect * rates.dtheta[k];
    out.f3[k] = f3 / (p.cv * w0);
  }

  const BeamField slope = ops.beam_dx * s.eta1;
  out.h = BeamField::Zero(g.beam_node_count());
  for (int i = 1; i < g.nx(); ++i) {
    const int k = g.index(i, g.ny());
    const Matrix2& B = map.B[k];
    const double d = map.delta[k];
    const Matrix2 S = G[k] * B.transpose() + B * G[k].transpose();
    const Eigen::Vector2d N(-slope[i], 1.0);
    out.h[i] = -p.mu / d * (S * N).y() - p.alpha / d * contract(G[k], B) + p.R0 * rt[k] + p.pi0;
  }
  out.h_tilde = out.h;
  out.h_hat = BeamField::Zero(g.beam_node_count());
  return out;
}

SourceSample eval_global_sources(const Grid2D& g, const DiffOps& ops, const FullState& s,
                                 const DiffeoMap& map, const PhysParams& p,
                                 const MeanFluctSplit& rho_split,
                                 const MeanFluctSplit& theta_split, const Rates& rates,
                                 const GlobalSourceOptions& opt) {
  const int n = g.node_count();
  const MatrixField G = gradient(ops, s.v);
  const ScalarField rt = s.rho.cwiseProduct(s.theta);
  const VectorField grad_rt = gradient(ops, rt);
  const VectorField grad_rho = gradient(ops, s.rho);
  const VectorField grad_th = gradient(ops, s.theta);
  const bool have_dv = rates.dv.size() == n, have_dth = rates.dtheta.size() == n;
  const MatrixField I(n, Matrix2::Identity());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double shear = opt.shear == ShearHeating::as_printed ? 2.0 * p.mu : 0.5 * p.mu;

  SourceSample out;
  out.f1.resize(n);
  out.f2 = stress_increment_divergence(g, ops, s.v, map.A, map.B, map.delta, I, I, ones, p);
  out.f3.resize(n);
  auto [div_heat, G_faces] = conormal_increment(g, ops, s.theta, map.A, I);
  out.g = std::move(G_faces);

  for (int k = 0; k < n; ++k) {
    const Matrix2& B = map.B[k];
    const double d = map.delta[k];
    const double trBG = contract(B, G[k]);
    const double divv = G[k].trace();
    out.f1[k] = -s.rho[k] * divv - (s.rho[k] + p.rho_bar) * (trBG / d - divv);

    const Eigen::Vector2d gr(grad_rho.x[k], grad_rho.y[k]), gt(grad_th.x[k], grad_th.y[k]);
    Eigen::Vector2d f2(out.f2.x[k], out.f2.y[k]);
    if (have_dv)
      f2 -= (p.rho_bar * (d - 1.0) + s.rho[k] * d) * Eigen::Vector2d(rates.dv.x[k], rates.dv.y[k]);
    f2 -= p.R0 * B * Eigen::Vector2d(grad_rt.x[k], grad_rt.y[k]);
    f2 -= p.R0 * (B - Matrix2::Identity()) * (p.rho_bar * gt + p.theta_bar * gr);
    out.f2.x[k] = f2.x() / p.rho_bar;
    out.f2.y[k] = f2.y() / p.rho_bar;

    const Matrix2 S = G[k] * B.transpose() + B * G[k].transpose();
    double f3 = -p.R0 * (rt[k] + p.rho_bar * s.theta[k] + p.theta_bar * s.rho[k]) * trBG +
                p.kappa * div_heat[k] + p.alpha / d * trBG * trBG + shear / d * S.squaredNorm();
    if (have_dth) f3 -= p.cv * (d * s.rho[k] + p.rho_bar * (d - 1.0)) * rates.dtheta[k];
    out.f3[k] = f3 / (p.cv * p.rho_bar);
  }

  const BeamField slope = ops.beam_dx * s.eta1;
  const int nb = g.beam_node_count();
  out.h = BeamField::Zero(nb);
  out.h_tilde = BeamField::Zero(nb);
  out.h_hat = BeamField::Zero(nb);
  const double rho_hat = rho_split.avg, th_hat = theta_split.avg;
  for (int i = 1; i < g.nx(); ++i) {
    const int k = g.index(i, g.ny());
    const Matrix2& B = map.B[k];
    const double d = map.delta[k];
    const Matrix2 S = G[k] * B.transpose() + B * G[k].transpose();
    const Eigen::Vector2d N(-slope[i], 1.0);
    const double sym_yy = G[k](1, 1);  // D(v) e2 . e2
    const double visc = -p.mu * ((S * N).y() / d - 2.0 * sym_yy) -
                        p.alpha * (contract(B, G[k]) / d - G[k].trace());
    const double rt_ = rho_split.tilde[k], tt_ = theta_split.tilde[k];
    out.h_tilde[i] = visc + p.R0 * (rt_ * tt_ + rt_ * th_hat + rho_hat * tt_);
    out.h_hat[i] = p.R0 * rho_hat * th_hat;
    out.h[i] = visc + p.R0 * rt[k];
  }
  return out;
}

CompatibilityReport check_compatibility(const Grid2D& g, const DiffOps& ops,
                                        const FullState& s, const DiffeoMap& X0,
                                        const PhysParams& p, Mode mode, double p_exp,
                                        double q_exp, double tol) {
  CompatibilityReport rep;
  const double r = 1.0 / p_exp + 1.0 / (2.0 * q_exp);
  const bool trace_regime = r < 1.0, neumann_regime = r < 0.5;
  const double h2 = std::max(g.hx(), g.hy()) * std::max(g.hx(), g.hy());
  auto add = [&](std::string name, double res, double t, bool applies) {
    rep.checks.push_back({std::move(name), res, t, applies, res <= t});
  };

  const BeamField d1 = ops.beam_dx * s.eta1;
  const int last = g.nx();
  add("eta1_0 clamped (value)", std::max(std::abs(s.eta1[0]), std::abs(s.eta1[last])), tol, true);
  add("eta1_0 clamped (slope)", std::max(std::abs(d1[0]), std::abs(d1[last])),
      50.0 * h2 * (1.0 + s.eta1.cwiseAbs().maxCoeff()), true);

  double trace = 0.0;
  for (int k : g.gamma_s_nodes())
    trace = std::max({trace, std::abs(s.v.x[k]), std::abs(s.v.y[k] - s.eta2[g.col(k)])});
  for (int k : g.gamma_0_nodes()) trace = std::max({trace, std::abs(s.v.x[k]), std::abs(s.v.y[k])});
  add("velocity trace v0 = eta2_0 e2 on Gamma_S, 0 on Gamma_0", trace, tol, trace_regime);
  add("eta2_0 vanishes at beam ends", std::max(std::abs(s.eta2[0]), std::abs(s.eta2[last])), tol,
      trace_regime);
  const BeamField d2 = ops.beam_dx * s.eta2;
  add("eta2_0 slope vanishes at beam ends", std::max(std::abs(d2[0]), std::abs(d2[last])),
      50.0 * h2 * (1.0 + s.eta2.cwiseAbs().maxCoeff()), neumann_regime);

  const MatrixField& A = mode == Mode::local ? X0.A : MatrixField(g.node_count(), Matrix2::Identity());
  const BoundaryField flux = conormal_flux(g, ops, A, s.theta);
  const double neumann = flux.size() ? flux.cwiseAbs().maxCoeff() : 0.0;
  add("conormal flux of theta_0 vanishes", neumann,
      50.0 * h2 * (1.0 + s.theta.cwiseAbs().maxCoeff()), neumann_regime);

  if (mode == Mode::local) {
    add("rho_0 positive", std::max(0.0, -s.rho.minCoeff()), 0.0, true);
    rep.checks.back().pass = s.rho.minCoeff() > 0.0;
  } else {
    const double m = (s.rho.array() + p.rho_bar).minCoeff();
    add("rho_0 + rho_bar positive", std::max(0.0, -m), 0.0, true);
    rep.checks.back().pass = m > 0.0;
  }
  return rep;
}

}  // namespace fsilab

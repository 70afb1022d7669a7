#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {
namespace {

SparseMatrix select(const SparseMatrix& M, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  std::vector<int> col_slot(M.cols(), -1);
  for (size_t c = 0; c < cols.size(); ++c) col_slot[cols[c]] = static_cast<int>(c);
  std::vector<int> row_slot(M.rows(), -1);
  for (size_t r = 0; r < rows.size(); ++r) row_slot[rows[r]] = static_cast<int>(r);
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < M.outerSize(); ++c) {
    if (col_slot[c] < 0) continue;
    for (SparseMatrix::InnerIterator it(M, c); it; ++it)
      if (row_slot[it.row()] >= 0) t.emplace_back(row_slot[it.row()], col_slot[c], it.value());
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
  return out;
}

Eigen::VectorXd stack(const VectorField& v) {
  Eigen::VectorXd out(2 * v.size());
  out << v.x, v.y;
  return out;
}

VectorField unstack(const Eigen::VectorXd& s) {
  const Eigen::Index n = s.size() / 2;
  return {s.head(n), s.tail(n)};
}

}  // namespace

VectorField velocity_trace(const Grid2D& g, const BeamField& eta2) {
  VectorField v = VectorField::zeros(g.node_count());
  for (int k : g.gamma_s_nodes()) v.y[k] = eta2[g.col(k)];
  return v;
}

VelocityStepper::VelocityStepper(const Grid2D& g, const DiffOps&, const PhysParams& p,
                                 const Metrics& m0, const ScalarField& rho0, double dt,
                                 TimeScheme scheme)
    : g_(&g), dt_(dt), theta_(implicit_weight(scheme)) {
  if (!(dt > 0.0)) throw ConfigError("velocity stepper: dt must be positive");
  if (!(rho0.minCoeff() > 0.0)) throw ConfigError("velocity stepper: rho0 must be positive");
  const int n = g.node_count();
  std::vector<FluxTensor> C(n);
  for (int k = 0; k < n; ++k) C[k] = stress_tensor(m0.A[k], m0.B[k], m0.delta[k], p.mu, p.alpha);
  SparseMatrix K = assemble_flux_divergence(g, 2, C);
  Eigen::VectorXd scale(2 * n);
  for (int k = 0; k < n; ++k) scale[k] = scale[n + k] = 1.0 / (g.weight(k) * rho0[k] * m0.delta[k]);
  L_ = scale.asDiagonal() * K;

  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < n; ++k) (g.on_boundary(k) ? fixed_ : free_).push_back(c * n + k);
  L_ff_ = select(L_, free_, free_);
  L_fb_ = select(L_, free_, fixed_);
  SparseMatrix I(L_ff_.rows(), L_ff_.cols());
  I.setIdentity();
  SparseMatrix M = I - theta_ * dt_ * L_ff_;
  lu_.compute(M);
  if (lu_.info() != Eigen::Success) throw SolverError("velocity stepper: factorization failed");
}

VectorField VelocityStepper::step(const VectorField& v, const BeamField& eta2_old,
                                  const BeamField& eta2_new, const VectorField& f2) const {
  const Eigen::VectorXd s = stack(v), f = stack(f2);
  const Eigen::VectorXd b_new = gather(stack(velocity_trace(*g_, eta2_new)), fixed_);
  Eigen::VectorXd vf = gather(s, free_);
  Eigen::VectorXd rhs = vf + dt_ * gather(f, free_) + theta_ * dt_ * (L_fb_ * b_new);
  if (theta_ < 1.0) {
    const Eigen::VectorXd b_old = gather(stack(velocity_trace(*g_, eta2_old)), fixed_);
    rhs += (1.0 - theta_) * dt_ * (L_ff_ * vf + L_fb_ * b_old);
  }
  const Eigen::VectorXd sol = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !sol.allFinite())
    throw SolverError("velocity stepper: solve failed");
  Eigen::VectorXd out(s.size());
  for (size_t i = 0; i < free_.size(); ++i) out[free_[i]] = sol[static_cast<Eigen::Index>(i)];
  for (size_t i = 0; i < fixed_.size(); ++i) out[fixed_[i]] = b_new[static_cast<Eigen::Index>(i)];
  return unstack(out);
}

VectorField VelocityStepper::apply_operator(const VectorField& v) const {
  return unstack(L_ * stack(v));
}

VectorField step_velocity(const Grid2D& g, const DiffOps& ops, const VectorField& v,
                          const BeamField& eta2, const VectorField& f2, const Metrics& m0,
                          const ScalarField& rho0, const PhysParams& p, double dt) {
  return VelocityStepper(g, ops, p, m0, rho0, dt).step(v, eta2, eta2, f2);
}

SparseMatrix lame_matrix(const Grid2D& g, const PhysParams& p) {
  std::vector<FluxTensor> C(g.node_count(),
                            stress_tensor(Matrix2::Identity(), Matrix2::Identity(), 1.0, p.mu, p.alpha));
  return assemble_flux_divergence(g, 2, C);
}

VectorField solve_lift_Dv(const Grid2D& g, const BeamField& eta2, const PhysParams& p) {
  const int n = g.node_count();
  SparseMatrix K = lame_matrix(g, p) / p.rho_bar;
  std::vector<int> free, fixed;
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < n; ++k) (g.on_boundary(k) ? fixed : free).push_back(c * n + k);
  const Eigen::VectorXd w_b = gather(stack(velocity_trace(g, eta2)), fixed);
  Eigen::SparseLU<SparseMatrix> lu(select(K, free, free));
  if (lu.info() != Eigen::Success) throw SolverError("lift: factorization failed");
  const Eigen::VectorXd rhs = -(select(K, free, fixed) * w_b);
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) throw SolverError("lift: solve failed");
  Eigen::VectorXd out(2 * n);
  for (size_t i = 0; i < free.size(); ++i) out[free[i]] = sol[static_cast<Eigen::Index>(i)];
  for (size_t i = 0; i < fixed.size(); ++i) out[fixed[i]] = w_b[static_cast<Eigen::Index>(i)];
  return unstack(out);
}

}  // namespace fsilab

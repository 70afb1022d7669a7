#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {

TemperatureStepper::TemperatureStepper(const Grid2D& g, const DiffOps&, const PhysParams& p,
                                       const Metrics& m0, const ScalarField& rho0, double dt,
                                       double gamma1, TimeScheme scheme)
    : g_(&g), dt_(dt), theta_(implicit_weight(scheme)), gamma1_(gamma1) {
  if (!(dt > 0.0)) throw ConfigError("temperature stepper: dt must be positive");
  if (!(gamma1 >= 0.0)) throw ConfigError("temperature stepper: gamma1 must be non-negative");
  if (!(rho0.minCoeff() > 0.0)) throw ConfigError("temperature stepper: rho0 must be positive");
  const int n = g.node_count();
  std::vector<FluxTensor> C(n);
  for (int k = 0; k < n; ++k) C[k] = conormal_tensor(m0.A[k]);
  c_.resize(n);
  for (int k = 0; k < n; ++k) c_[k] = p.kappa / (p.cv * rho0[k] * m0.delta[k]);
  const Eigen::VectorXd row_scale = c_.cwiseQuotient(g.weights());
  L_ = row_scale.asDiagonal() * assemble_flux_divergence(g, 1, C);
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix M = (1.0 + theta_ * dt_ * gamma1_) * I - theta_ * dt_ * L_;
  lu_.compute(M);
  if (lu_.info() != Eigen::Success) throw SolverError("temperature stepper: factorization failed");
}

ScalarField TemperatureStepper::apply_operator(const ScalarField& theta,
                                               const BoundaryField& g) const {
  const Eigen::VectorXd load = boundary_load(*g_, g).cwiseQuotient(g_->weights());
  return L_ * theta + c_.cwiseProduct(load) - gamma1_ * theta;
}

ScalarField TemperatureStepper::step(const ScalarField& theta, const ScalarField& f3,
                                     const BoundaryField& g) const {
  const Eigen::VectorXd load = boundary_load(*g_, g).cwiseQuotient(g_->weights());
  Eigen::VectorXd rhs = theta + dt_ * (f3 + c_.cwiseProduct(load));
  if (theta_ < 1.0) rhs += (1.0 - theta_) * dt_ * (L_ * theta - gamma1_ * theta);
  const Eigen::VectorXd out = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !out.allFinite())
    throw SolverError("temperature stepper: solve failed");
  return out;
}

ScalarField step_temperature(const Grid2D& g, const DiffOps& ops, const ScalarField& theta,
                             const ScalarField& f3, const BoundaryField& bc, const Metrics& m0,
                             const ScalarField& rho0, const PhysParams& p, double dt,
                             double gamma1) {
  return TemperatureStepper(g, ops, p, m0, rho0, dt, gamma1).step(theta, f3, bc);
}

}  // namespace fsilab

#include <cmath>

#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {

PlateStepper::PlateStepper(const Grid2D& g, const DiffOps& ops, double dt, TimeScheme scheme)
    : ops_(&ops), dt_(dt), theta_(implicit_weight(scheme)), h_(g.hx()) {
  if (!(dt > 0.0)) throw ConfigError("plate stepper: dt must be positive");
  const int m = g.nx() - 1;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < m; ++i) t.emplace_back(i, m + i, 1.0);
  for (int c = 0; c < m; ++c) {
    for (SparseMatrix::InnerIterator it(ops.beam_bilaplacian, c); it; ++it)
      t.emplace_back(m + it.row(), it.col(), -it.value());
    for (SparseMatrix::InnerIterator it(ops.beam_laplacian, c); it; ++it)
      t.emplace_back(m + it.row(), m + it.col(), it.value());
  }
  A_.resize(2 * m, 2 * m);
  A_.setFromTriplets(t.begin(), t.end());
  SparseMatrix I(2 * m, 2 * m);
  I.setIdentity();
  SparseMatrix M = I - theta_ * dt_ * A_;
  lu_.compute(M);
  if (lu_.info() != Eigen::Success) throw SolverError("plate stepper: factorization failed");
}

std::pair<BeamField, BeamField> PlateStepper::step(const BeamField& eta1, const BeamField& eta2,
                                                   const BeamField& h) const {
  const Eigen::Index m = eta1.size() - 2;
  Eigen::VectorXd y(2 * m);
  y << beam_interior(eta1), beam_interior(eta2);
  Eigen::VectorXd rhs = y + (1.0 - theta_) * dt_ * (A_ * y);
  rhs.tail(m) += dt_ * beam_interior(h);
  Eigen::VectorXd out = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !out.allFinite())
    throw SolverError("plate stepper: solve failed");
  return {beam_full(out.head(m)), beam_full(out.tail(m))};
}

double PlateStepper::energy(const BeamField& eta1, const BeamField& eta2) const {
  const Eigen::VectorXd e1 = beam_interior(eta1), e2 = beam_interior(eta2);
  return 0.5 * h_ * (e2.squaredNorm() + e1.dot(ops_->beam_bilaplacian * e1));
}

std::pair<BeamField, BeamField> step_plate(const Grid2D& g, const DiffOps& ops,
                                           const BeamField& eta1, const BeamField& eta2,
                                           const BeamField& h, double dt, TimeScheme scheme) {
  return PlateStepper(g, ops, dt, scheme).step(eta1, eta2, h);
}

}  // namespace fsilab

#include "fsilab/linear.hpp"

namespace fsilab {

SourceBundle SourceBundle::zeros(const Grid2D& grid, int steps, double dt) {
  SourceBundle s;
  s.dt = dt;
  const auto n = static_cast<size_t>(steps) + 1;
  const int nn = grid.node_count();
  s.f1.assign(n, ScalarField::Zero(nn));
  s.f2.assign(n, VectorField::zeros(nn));
  s.f3.assign(n, ScalarField::Zero(nn));
  s.g.assign(n, BoundaryField::Zero(static_cast<Eigen::Index>(grid.boundary_faces().size())));
  s.h.assign(n, BeamField::Zero(grid.beam_node_count()));
  return s;
}

ScalarField density_rate(const DiffOps& ops, const VectorField& v, const Metrics& m0,
                         const ScalarField& rho0) {
  const MatrixField G = gradient(ops, v);
  ScalarField out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k)
    out[k] = -rho0[k] / m0.delta[k] * G[k].cwiseProduct(m0.B[k]).sum();
  return out;
}

ScalarField step_density(const DiffOps& ops, const ScalarField& rho, const VectorField& v_old,
                         const VectorField& v_new, const ScalarField& f1_old,
                         const ScalarField& f1_new, const Metrics& m0, const ScalarField& rho0,
                         double dt) {
  return rho + 0.5 * dt *
                   (density_rate(ops, v_old, m0, rho0) + density_rate(ops, v_new, m0, rho0) +
                    f1_old + f1_new);
}

}  // namespace fsilab

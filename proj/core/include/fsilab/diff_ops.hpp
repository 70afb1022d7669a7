#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <vector>

#include "fsilab/grid.hpp"

namespace fsilab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Matrix2 = Eigen::Matrix2d;
using MatrixField = std::vector<Matrix2>;

// Discrete operators on a Grid2D. Node-based matrices act on ScalarField.
struct DiffOps {
  // Second-order first derivatives: centered inside, one-sided at the boundary.
  SparseMatrix dx, dy;
  // Centered inside with a first-order boundary closure. Together with the
  // trapezoid weights W they satisfy 1^T W div_x u = boundary flux exactly.
  SparseMatrix div_x, div_y;
  // Five-point Laplacian with natural (zero-flux) Neumann closure.
  SparseMatrix laplacian;
  // Beam operators. beam_dx acts on all nx + 1 beam nodes; the Laplacian and
  // bilaplacian act on the nx - 1 interior beam nodes (Dirichlet and clamped
  // closures respectively).
  SparseMatrix beam_dx;
  SparseMatrix beam_laplacian;
  SparseMatrix beam_bilaplacian;
};

DiffOps diff_ops(const Grid2D& g);

// (grad v)_{ij} = d_j v_i at every node, using dx and dy.
MatrixField gradient(const DiffOps& ops, const VectorField& v);
MatrixField symmetric_gradient(const DiffOps& ops, const VectorField& v);
VectorField gradient(const DiffOps& ops, const ScalarField& f);
ScalarField divergence(const DiffOps& ops, const VectorField& v);
// Conservative divergence built from div_x and div_y.
ScalarField divergence_sbp(const DiffOps& ops, const VectorField& v);

// Beam helpers. Full beam fields carry the clamped endpoints.
Eigen::VectorXd beam_interior(const BeamField& f);
BeamField beam_full(const Eigen::VectorXd& interior);
BeamField apply_beam_laplacian(const DiffOps& ops, const BeamField& f);
BeamField apply_beam_bilaplacian(const DiffOps& ops, const BeamField& f);

// Unit outward normal at a boundary node (diagonal at corners).
Eigen::Vector2d outward_normal(const Grid2D& g, int node);

// Flux-form operators. A coefficient tensor C gives the flux
//   F_{ij} = sum_{k,l} C_{ijkl} d_l u_k
// for an ncomp-component field u (components stacked). The assembled matrix
// returns the control-volume integral of div F using interior faces only:
// normal derivatives across a face are compact, tangential ones are averaged
// from the adjacent nodes. Boundary faces are left to the caller (Neumann data).
using FluxTensor = std::array<double, 16>;
constexpr int flux_index(int i, int j, int k, int l) { return ((i * 2 + j) * 2 + k) * 2 + l; }

FluxTensor conormal_tensor(const Matrix2& M);
// Tensor of T(v) = mu grad v A + ((mu + alpha) / delta) B (grad v)^T B.
FluxTensor stress_tensor(const Matrix2& A, const Matrix2& B, double delta, double mu,
                         double alpha);

SparseMatrix assemble_flux_divergence(const Grid2D& g, int ncomp,
                                      const std::vector<FluxTensor>& C);
Eigen::VectorXd apply_flux_divergence(const Grid2D& g, const DiffOps& ops, int ncomp,
                                      const std::vector<FluxTensor>& C, const Eigen::VectorXd& u);

// n . M grad(theta) on every boundary face, using dx and dy.
BoundaryField conormal_flux(const Grid2D& g, const DiffOps& ops, const MatrixField& M,
                            const ScalarField& theta);
// Per-node sum of face length times face value.
Eigen::VectorXd boundary_load(const Grid2D& g, const BoundaryField& values);

}  // namespace fsilab

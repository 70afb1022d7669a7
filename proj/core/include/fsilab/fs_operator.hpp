#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fsilab/diff_ops.hpp"
#include "fsilab/grid.hpp"
#include "fsilab/params.hpp"
#include "fsilab/sources.hpp"

namespace fsilab {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

// Offsets of the stacked unknown
//   [rho (all nodes) | v1 (interior) | v2 (interior) | theta (all nodes) |
//    eta1 (interior beam) | eta2 (interior beam)].
// Boundary velocities are not unknowns: v = eta2 e2 on Gamma_S, 0 on Gamma_0.
struct BlockLayout {
  int rho = 0, v1 = 0, v2 = 0, theta = 0, eta1 = 0, eta2 = 0;
  int n_nodes = 0, n_interior = 0, n_beam = 0;
  int size = 0;
  static BlockLayout fluid_structure(const Grid2D& g);
  static BlockLayout plate_only(const Grid2D& g);
};

enum class Domain { full, Xm };

struct OperatorMatrix {
  SparseMatrix A;
  Domain domain = Domain::full;
  BlockLayout layout;
  // Constraint functionals defining X_m (empty for the plate-only operator):
  // ell1 . x = int rho + rho_bar int eta1, ell2 . x = int theta.
  std::vector<Eigen::VectorXd> constraints;
  // Symmetric positive definite weight of the scan norm |x|_E^2 = x^T E x.
  SparseMatrix energy;
  std::string label;
  Eigen::Index size() const { return A.rows(); }
};

struct AssemblyOptions {
  // Density diffusion tau hx hy Lap_N rho that removes grid-scale null modes.
  bool stabilize = true;
  // Use a W^{1,2}-type weight on the rho block of the scan norm.
  bool rho_h1_norm = false;
};

// A_FS = A0_FS + B_FS. B_FS holds the pressure couplings (gradients of rho and
// theta in the velocity rows and their traces in the plate row).
struct OperatorSplit {
  OperatorMatrix full, a0, b;
};
OperatorSplit assemble_AFS_split(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                                 const AssemblyOptions& opt = {});
OperatorMatrix assemble_AFS(const Grid2D& g, const PhysParams& p, const AssemblyOptions& opt = {});

// d/dt (eta1, eta2) = (eta2, -D^4 eta1 + D^2 eta2) on the interior beam nodes.
OperatorMatrix plate_operator(const Grid2D& g, const DiffOps& ops);

// D^4 + (R0 theta_bar rho_bar / |F|) int(.) ds on the interior beam nodes.
Eigen::MatrixXd plate_auxiliary_matrix(const Grid2D& g, const DiffOps& ops, const PhysParams& p);

// FullState <-> stacked vector. Global-mode perturbations are expected.
Eigen::VectorXd pack(const Grid2D& g, const BlockLayout& L, const FullState& s);
FullState unpack(const Grid2D& g, const BlockLayout& L, const Eigen::VectorXd& x);

// Remove the constant parts violating the X_m constraints (rho and theta only).
Eigen::VectorXd project_Xm(const Grid2D& g, const OperatorMatrix& op, const Eigen::VectorXd& x);

// Orthonormal basis Q of X_m (N x (N - m)) from Householder reflectors of the
// m constraints, and the restricted dense matrix Q^T A Q.
Eigen::MatrixXd Xm_basis(const OperatorMatrix& op);
Eigen::MatrixXd restrict_dense(const OperatorMatrix& op);

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& M);
struct Eigenpairs {
  std::vector<Complex> values;
  Eigen::MatrixXcd vectors;  // columns, unit Euclidean norm
};
Eigenpairs eigenpairs(const Eigen::MatrixXd& M);
std::vector<double> singular_values(const Eigen::MatrixXd& M);

// Spectrum of the operator; Domain::Xm uses the deflated matrix.
std::vector<Complex> spectrum(const OperatorMatrix& op, Domain restrict);
double max_real_part(const std::vector<Complex>& ev);
// Dimension of the numerical kernel (singular values below rel_tol * max).
int kernel_dimension(const OperatorMatrix& op, double rel_tol = 1e-10);

// Factorization of (lambda I - A). On Domain::Xm the solve is bordered by the
// constraints, so it is well posed at lambda = 0. Throws SolverError when the
// matrix is numerically singular (condition estimate above 1e13).
class Resolvent {
 public:
  Resolvent(const OperatorMatrix& op, Complex lambda);
  ComplexVector solve(const ComplexVector& rhs) const;
  ComplexVector solve_adjoint(const ComplexVector& rhs) const;
  double condition_estimate() const { return cond_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double cond_ = 0.0;
};
ComplexVector resolvent_solve(const OperatorMatrix& op, Complex lambda, const ComplexVector& rhs);

struct SectorSample {
  Complex lambda;
  double phi = 0.0;
  double radius = 0.0;
  double bound = 0.0;  // |mu (lambda - A)^{-1}|_E, mu = lambda - gamma
  bool singular = false;
};
struct SectorScanResult {
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<SectorSample> samples;
  double M_hat = 0.0;
  int singular_count = 0;
  bool pass(double cap) const { return singular_count == 0 && M_hat <= cap; }
};
struct ScanOptions {
  double angle_margin = 0.05;  // epsilon in phi = beta - epsilon
  int power_iterations = 60;
  double power_tol = 1e-7;
  unsigned seed = 7;
};
// Samples lambda = gamma + r e^{+-i phi}, phi in {0, beta/2, beta - eps}.
SectorScanResult sector_scan(const OperatorMatrix& op, double beta,
                             const std::vector<double>& radii, double gamma,
                             const ScanOptions& opt = {});
// Energy-norm |mu (lambda - A)^{-1}| for one lambda (power iteration).
double scaled_resolvent_norm(const OperatorMatrix& op, Complex lambda, Complex mu,
                             const ScanOptions& opt = {});

struct GammaSearch {
  double gamma = 0.0;
  SectorScanResult scan;
  int attempts = 0;
  bool found = false;
};
// gamma = 0, then gamma0 * 2^k until the scan passes with M_hat <= cap.
GammaSearch find_gamma(const OperatorMatrix& op, double beta, const std::vector<double>& radii,
                       double cap, double gamma0 = 0.01, int max_attempts = 20,
                       const ScanOptions& opt = {});

struct PerturbationReport {
  double a = 0.0;
  double b = 0.0;
  double M_hat = 0.0;
  bool condition = false;  // a * M_hat^2 < 1
  int samples = 0;
};
// Least-squares fit of |B x| ~ a |A0 x| + b |x| in the scan norm, over random
// vectors smoothed by (s - A0)^{-1} at several scales s.
PerturbationReport perturbation_check(const OperatorMatrix& A0, const OperatorMatrix& B,
                                      double M_hat, unsigned seed = 11, int samples = 48);

}  // namespace fsilab

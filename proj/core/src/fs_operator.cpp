#include "fsilab/fs_operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Householder>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <lapacke.h>

#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

void add_block(Triplets& t, const SparseMatrix& M, int r0, int c0, double scale = 1.0) {
  for (int c = 0; c < M.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(M, c); it; ++it)
      t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                     scale * it.value());
}

SparseMatrix build(int rows, int cols, const Triplets& t) {
  SparseMatrix M(rows, cols);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

std::vector<int> top_nodes(const Grid2D& g) {
  std::vector<int> out;
  for (int i = 1; i < g.nx(); ++i) out.push_back(g.index(i, g.ny()));
  return out;
}

SparseMatrix selector(const std::vector<int>& rows, int n) {
  Triplets t;
  for (size_t r = 0; r < rows.size(); ++r) t.emplace_back(static_cast<int>(r), rows[r], 1.0);
  return build(static_cast<int>(rows.size()), n, t);
}

// Full nodal velocity (x block then y block) from the stacked unknown.
SparseMatrix prolongation(const Grid2D& g, const BlockLayout& L) {
  const int n = g.node_count();
  Triplets t;
  const auto& inner = g.interior_nodes();
  for (size_t s = 0; s < inner.size(); ++s) {
    t.emplace_back(inner[s], L.v1 + static_cast<int>(s), 1.0);
    t.emplace_back(n + inner[s], L.v2 + static_cast<int>(s), 1.0);
  }
  const auto top = top_nodes(g);
  for (size_t b = 0; b < top.size(); ++b) t.emplace_back(n + top[b], L.eta2 + static_cast<int>(b), 1.0);
  return build(2 * n, L.size, t);
}

SparseMatrix energy_matrix(const Grid2D& g, const DiffOps& ops, const BlockLayout& L,
                           const PhysParams& p, bool rho_h1) {
  const int n = g.node_count();
  Triplets t;
  const Eigen::VectorXd& W = g.weights();
  const double wr = p.R0 * p.theta_bar / p.rho_bar;
  if (rho_h1) {
    SparseMatrix G = SparseMatrix(ops.dx.transpose()) * W.asDiagonal() * ops.dx +
                     SparseMatrix(ops.dy.transpose()) * W.asDiagonal() * ops.dy;
    add_block(t, G, L.rho, L.rho, wr);
  }
  for (int k = 0; k < n; ++k) {
    t.emplace_back(L.rho + k, L.rho + k, wr * W[k]);
    t.emplace_back(L.theta + k, L.theta + k, W[k]);
  }
  for (int s = 0; s < L.n_interior; ++s) {
    t.emplace_back(L.v1 + s, L.v1 + s, p.rho_bar * g.hx() * g.hy());
    t.emplace_back(L.v2 + s, L.v2 + s, p.rho_bar * g.hx() * g.hy());
  }
  add_block(t, ops.beam_bilaplacian, L.eta1, L.eta1, g.hx());
  for (int b = 0; b < L.n_beam; ++b) t.emplace_back(L.eta2 + b, L.eta2 + b, g.hx());
  return build(L.size, L.size, t);
}

SparseMatrix plate_energy(const Grid2D& g, const DiffOps& ops, const BlockLayout& L) {
  Triplets t;
  add_block(t, ops.beam_bilaplacian, L.eta1, L.eta1, g.hx());
  for (int b = 0; b < L.n_beam; ++b) t.emplace_back(L.eta2 + b, L.eta2 + b, g.hx());
  return build(L.size, L.size, t);
}

// Norm |x|_E = |C x| with C = L^T from E = L L^T (natural ordering, no permutation).
class EnergyFactor {
 public:
  explicit EnergyFactor(const SparseMatrix& E) : llt_(E) {
    if (llt_.info() != Eigen::Success) throw NumericalError("scan norm weight is not positive definite");
  }
  ComplexVector C(const ComplexVector& x) const { return apply(x, 0); }
  ComplexVector C_inv(const ComplexVector& x) const { return apply(x, 1); }
  ComplexVector Ct(const ComplexVector& x) const { return apply(x, 2); }
  ComplexVector Ct_inv(const ComplexVector& x) const { return apply(x, 3); }

 private:
  Eigen::VectorXd real_apply(const Eigen::VectorXd& x, int mode) const {
    switch (mode) {
      case 0: return llt_.matrixU() * x;
      case 1: return llt_.matrixU().solve(x);
      case 2: return llt_.matrixL() * x;
      default: return llt_.matrixL().solve(x);
    }
  }
  ComplexVector apply(const ComplexVector& x, int mode) const {
    const Eigen::VectorXd re = real_apply(x.real(), mode), im = real_apply(x.imag(), mode);
    ComplexVector out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
  }
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt_;
};

ComplexVector random_complex(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = Complex(nd(rng), nd(rng));
  return x / x.norm();
}

}  // namespace

BlockLayout BlockLayout::fluid_structure(const Grid2D& g) {
  BlockLayout L;
  L.n_nodes = g.node_count();
  L.n_interior = static_cast<int>(g.interior_nodes().size());
  L.n_beam = g.nx() - 1;
  L.rho = 0;
  L.v1 = L.n_nodes;
  L.v2 = L.v1 + L.n_interior;
  L.theta = L.v2 + L.n_interior;
  L.eta1 = L.theta + L.n_nodes;
  L.eta2 = L.eta1 + L.n_beam;
  L.size = L.eta2 + L.n_beam;
  return L;
}

BlockLayout BlockLayout::plate_only(const Grid2D& g) {
  BlockLayout L;
  L.n_beam = g.nx() - 1;
  L.eta1 = 0;
  L.eta2 = L.n_beam;
  L.size = 2 * L.n_beam;
  return L;
}

OperatorSplit assemble_AFS_split(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                                 const AssemblyOptions& opt) {
  const BlockLayout L = BlockLayout::fluid_structure(g);
  const int n = g.node_count();
  const SparseMatrix P = prolongation(g, L);
  const SparseMatrix P1 = P.topRows(n), P2 = P.bottomRows(n);
  const SparseMatrix SI = selector(g.interior_nodes(), n);
  const SparseMatrix ST = selector(top_nodes(g), n);

  Triplets a0, b;
  // Continuity: -rho_bar div v (+ stabilization).
  add_block(a0, SparseMatrix(ops.div_x * P1 + ops.div_y * P2), L.rho, 0, -p.rho_bar);
  if (opt.stabilize) {
    const double tau = p.rho_bar * p.R0 * p.theta_bar / (4.0 * (2.0 * p.mu + p.alpha));
    add_block(a0, ops.laplacian, L.rho, L.rho, tau * g.hx() * g.hy());
  }
  // Momentum: Lame / rho_bar with the beam velocity as Dirichlet data.
  Eigen::VectorXd scale(2 * n);
  for (int k = 0; k < n; ++k) scale[k] = scale[n + k] = 1.0 / (g.weight(k) * p.rho_bar);
  const SparseMatrix LP = scale.asDiagonal() * lame_matrix(g, p) * P;
  add_block(a0, SparseMatrix(SI * LP.topRows(n)), L.v1, 0);
  add_block(a0, SparseMatrix(SI * LP.bottomRows(n)), L.v2, 0);
  add_block(b, SparseMatrix(SI * ops.dx), L.v1, L.rho, -p.R0 * p.theta_bar / p.rho_bar);
  add_block(b, SparseMatrix(SI * ops.dy), L.v2, L.rho, -p.R0 * p.theta_bar / p.rho_bar);
  add_block(b, SparseMatrix(SI * ops.dx), L.v1, L.theta, -p.R0);
  add_block(b, SparseMatrix(SI * ops.dy), L.v2, L.theta, -p.R0);
  // Heat.
  add_block(a0, ops.laplacian, L.theta, L.theta, p.kappa_bar());
  // Plate.
  SparseMatrix I(L.n_beam, L.n_beam);
  I.setIdentity();
  add_block(a0, I, L.eta1, L.eta2);
  add_block(a0, ops.beam_bilaplacian, L.eta2, L.eta1, -1.0);
  add_block(a0, ops.beam_laplacian, L.eta2, L.eta2);
  const SparseMatrix stress = ST * (2.0 * p.mu * ops.dy * P2 + p.alpha * (ops.dx * P1 + ops.dy * P2));
  add_block(a0, stress, L.eta2, 0, -1.0);
  add_block(b, ST, L.eta2, L.rho, p.R0 * p.theta_bar);
  add_block(b, ST, L.eta2, L.theta, p.R0 * p.rho_bar);

  OperatorSplit out;
  std::vector<Eigen::VectorXd> ell(2, Eigen::VectorXd::Zero(L.size));
  ell[0].segment(L.rho, n) = g.weights();
  ell[0].segment(L.eta1, L.n_beam).setConstant(p.rho_bar * g.hx());
  ell[1].segment(L.theta, n) = g.weights();
  const SparseMatrix E = energy_matrix(g, ops, L, p, opt.rho_h1_norm);
  auto make = [&](SparseMatrix A, std::string label) {
    OperatorMatrix op;
    op.A = std::move(A);
    op.layout = L;
    op.constraints = ell;
    op.energy = E;
    op.label = std::move(label);
    return op;
  };
  out.a0 = make(build(L.size, L.size, a0), "A0_FS");
  out.b = make(build(L.size, L.size, b), "B_FS");
  out.full = make(out.a0.A + out.b.A, "A_FS");
  if (out.full.A.rows() != L.size || out.full.A.cols() != L.size)
    throw NumericalError("A_FS assembly: block size mismatch");
  return out;
}

OperatorMatrix assemble_AFS(const Grid2D& g, const PhysParams& p, const AssemblyOptions& opt) {
  const DiffOps ops = diff_ops(g);
  return assemble_AFS_split(g, ops, p, opt).full;
}

OperatorMatrix plate_operator(const Grid2D& g, const DiffOps& ops) {
  OperatorMatrix op;
  op.layout = BlockLayout::plate_only(g);
  op.A = PlateStepper(g, ops, 1.0).generator().sparseView();
  op.energy = plate_energy(g, ops, op.layout);
  op.label = "A_S";
  return op;
}

Eigen::MatrixXd plate_auxiliary_matrix(const Grid2D& g, const DiffOps& ops, const PhysParams& p) {
  Eigen::MatrixXd M(ops.beam_bilaplacian);
  M.array() += p.R0 * p.theta_bar * p.rho_bar / g.area() * g.hx();
  return M;
}

Eigen::VectorXd pack(const Grid2D& g, const BlockLayout& L, const FullState& s) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.size);
  if (L.n_nodes > 0) {
    x.segment(L.rho, L.n_nodes) = s.rho;
    x.segment(L.theta, L.n_nodes) = s.theta;
    const auto& inner = g.interior_nodes();
    for (size_t i = 0; i < inner.size(); ++i) {
      x[L.v1 + static_cast<Eigen::Index>(i)] = s.v.x[inner[i]];
      x[L.v2 + static_cast<Eigen::Index>(i)] = s.v.y[inner[i]];
    }
  }
  x.segment(L.eta1, L.n_beam) = beam_interior(s.eta1);
  x.segment(L.eta2, L.n_beam) = beam_interior(s.eta2);
  return x;
}

FullState unpack(const Grid2D& g, const BlockLayout& L, const Eigen::VectorXd& x) {
  FullState s = FullState::zeros(g);
  s.eta1 = beam_full(x.segment(L.eta1, L.n_beam));
  s.eta2 = beam_full(x.segment(L.eta2, L.n_beam));
  if (L.n_nodes > 0) {
    s.rho = x.segment(L.rho, L.n_nodes);
    s.theta = x.segment(L.theta, L.n_nodes);
    const auto& inner = g.interior_nodes();
    for (size_t i = 0; i < inner.size(); ++i) {
      s.v.x[inner[i]] = x[L.v1 + static_cast<Eigen::Index>(i)];
      s.v.y[inner[i]] = x[L.v2 + static_cast<Eigen::Index>(i)];
    }
    s.v = s.v + velocity_trace(g, s.eta2);
  }
  return s;
}

Eigen::VectorXd project_Xm(const Grid2D& g, const OperatorMatrix& op, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  if (op.constraints.size() < 2) return y;
  const BlockLayout& L = op.layout;
  const double wsum = g.weights().sum();
  y.segment(L.rho, L.n_nodes).array() -= op.constraints[0].dot(x) / wsum;
  y.segment(L.theta, L.n_nodes).array() -= op.constraints[1].dot(x) / wsum;
  return y;
}

namespace {

Eigen::HouseholderQR<Eigen::MatrixXd> constraint_qr(const OperatorMatrix& op) {
  Eigen::MatrixXd C(op.size(), static_cast<Eigen::Index>(op.constraints.size()));
  for (size_t i = 0; i < op.constraints.size(); ++i) C.col(static_cast<Eigen::Index>(i)) = op.constraints[i];
  return Eigen::HouseholderQR<Eigen::MatrixXd>(C);
}

}  // namespace

Eigen::MatrixXd Xm_basis(const OperatorMatrix& op) {
  const Eigen::Index N = op.size(), m = static_cast<Eigen::Index>(op.constraints.size());
  if (m == 0) return Eigen::MatrixXd::Identity(N, N);
  const auto qr = constraint_qr(op);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(N, N);
  Q.applyOnTheLeft(qr.householderQ());
  return Q.rightCols(N - m);
}

Eigen::MatrixXd restrict_dense(const OperatorMatrix& op) {
  const Eigen::Index N = op.size(), m = static_cast<Eigen::Index>(op.constraints.size());
  Eigen::MatrixXd M(op.A);
  if (m == 0) return M;
  const auto qr = constraint_qr(op);
  M.applyOnTheLeft(qr.householderQ().adjoint());
  M.applyOnTheRight(qr.householderQ());
  return M.bottomRightCorner(N - m, N - m);
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& M) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  Eigen::MatrixXd a = M;
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("eigensolver failed (dgeev info " + std::to_string(info) + ")");
  std::vector<Complex> ev(n);
  for (lapack_int i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
  return ev;
}

Eigenpairs eigenpairs(const Eigen::MatrixXd& M) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  Eigen::MatrixXd a = M, vr(n, n);
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, vr.data(), n);
  if (info != 0) throw NumericalError("eigensolver failed (dgeev info " + std::to_string(info) + ")");
  Eigenpairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    out.values[j] = {wr[j], wi[j]};
    if (wi[j] != 0.0 && j + 1 < n) {
      const Eigen::VectorXcd v = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
      out.values[j + 1] = {wr[j + 1], wi[j + 1]};
      out.vectors.col(j) = v.normalized();
      out.vectors.col(j + 1) = v.conjugate().normalized();
      ++j;
    } else {
      out.vectors.col(j) = vr.col(j).cast<Complex>().normalized();
    }
  }
  return out;
}

std::vector<double> singular_values(const Eigen::MatrixXd& M) {
  const lapack_int m = static_cast<lapack_int>(M.rows()), n = static_cast<lapack_int>(M.cols());
  Eigen::MatrixXd a = M;
  std::vector<double> s(std::min(m, n));
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(),
                                         nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("SVD failed (dgesdd info " + std::to_string(info) + ")");
  return s;
}

std::vector<Complex> spectrum(const OperatorMatrix& op, Domain restrict) {
  if (restrict == Domain::Xm) return eigenvalues(restrict_dense(op));
  return eigenvalues(Eigen::MatrixXd(op.A));
}

double max_real_part(const std::vector<Complex>& ev) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : ev) m = std::max(m, z.real());
  return m;
}

int kernel_dimension(const OperatorMatrix& op, double rel_tol) {
  const auto s = singular_values(Eigen::MatrixXd(op.A));
  if (s.empty()) return 0;
  const double smax = *std::max_element(s.begin(), s.end());
  return static_cast<int>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= rel_tol * smax; }));
}

struct Resolvent::Impl {
  Eigen::Index n = 0;
  ComplexSparse K;
  Eigen::SparseLU<ComplexSparse> lu, lu_adj;
};

Resolvent::Resolvent(const OperatorMatrix& op, Complex lambda) {
  auto impl = std::make_shared<Impl>();
  const Eigen::Index N = op.size();
  impl->n = N;
  const bool border = op.domain == Domain::Xm && !op.constraints.empty();
  const Eigen::Index m = border ? static_cast<Eigen::Index>(op.constraints.size()) : 0;
  double amax = 0.0;
  for (int c = 0; c < op.A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(op.A, c); it; ++it) amax = std::max(amax, std::abs(it.value()));
  amax = std::max({amax, std::abs(lambda), 1.0});

  std::vector<Eigen::Triplet<Complex>> t;
  for (int c = 0; c < op.A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(op.A, c); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value());
  for (Eigen::Index i = 0; i < N; ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), lambda);
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::VectorXd ell = op.constraints[static_cast<size_t>(c)].normalized() * amax;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (ell[i] == 0.0) continue;
      t.emplace_back(static_cast<int>(i), static_cast<int>(N + c), ell[i]);
      t.emplace_back(static_cast<int>(N + c), static_cast<int>(i), ell[i]);
    }
  }
  impl->K.resize(N + m, N + m);
  impl->K.setFromTriplets(t.begin(), t.end());
  impl->K.makeCompressed();
  impl->lu.compute(impl->K);
  if (impl->lu.info() != Eigen::Success) throw SolverError("resolvent: singular at lambda", 0.0);
  ComplexSparse Kh = impl->K.adjoint();
  impl->lu_adj.compute(Kh);
  if (impl->lu_adj.info() != Eigen::Success) throw SolverError("resolvent: singular at lambda", 0.0);
  impl_ = impl;

  // Condition estimate |K|_1 / sigma_min by inverse iteration on K^H K.
  double knorm = 0.0;
  for (int c = 0; c < impl->K.outerSize(); ++c) {
    double s = 0.0;
    for (ComplexSparse::InnerIterator it(impl->K, c); it; ++it) s += std::abs(it.value());
    knorm = std::max(knorm, s);
  }
  std::mt19937 rng(3);
  ComplexVector x = random_complex(N + m, rng);
  double inv = 0.0;
  for (int it = 0; it < 4; ++it) {
    const ComplexVector y = impl->lu_adj.solve(ComplexVector(impl->lu.solve(x)));
    inv = std::sqrt(y.norm());
    if (!std::isfinite(inv)) break;
    x = y / y.norm();
  }
  cond_ = std::isfinite(inv) ? knorm * inv : std::numeric_limits<double>::infinity();
  if (!(cond_ < 1e13)) throw SolverError("resolvent: numerically singular at lambda", cond_);
}

ComplexVector Resolvent::solve(const ComplexVector& rhs) const {
  ComplexVector b = ComplexVector::Zero(impl_->K.rows());
  b.head(impl_->n) = rhs;
  const ComplexVector x = impl_->lu.solve(b);
  if (!x.allFinite()) throw SolverError("resolvent: solve produced non-finite values", 0.0);
  return x.head(impl_->n);
}

ComplexVector Resolvent::solve_adjoint(const ComplexVector& rhs) const {
  ComplexVector b = ComplexVector::Zero(impl_->K.rows());
  b.head(impl_->n) = rhs;
  const ComplexVector x = impl_->lu_adj.solve(b);
  if (!x.allFinite()) throw SolverError("resolvent: solve produced non-finite values", 0.0);
  return x.head(impl_->n);
}

ComplexVector resolvent_solve(const OperatorMatrix& op, Complex lambda, const ComplexVector& rhs) {
  return Resolvent(op, lambda).solve(rhs);
}

double scaled_resolvent_norm(const OperatorMatrix& op, Complex lambda, Complex mu,
                             const ScanOptions& opt) {
  const Resolvent R(op, lambda);
  const EnergyFactor C(op.energy);
  // On X_m the iteration runs on the E-orthogonal complement of the constraints,
  // which in the factored coordinates x = U b is orthogonal to L^{-1} ell.
  std::vector<ComplexVector> basis;
  if (op.domain == Domain::Xm) {
    for (const auto& ell : op.constraints) {
      ComplexVector u = C.Ct_inv(ell.cast<Complex>());
      for (const auto& w : basis) u -= w.dot(u) * w;
      basis.push_back(u / u.norm());
    }
  }
  auto restrict = [&](ComplexVector v) {
    for (const auto& w : basis) v -= w.dot(v) * w;
    return v;
  };
  std::mt19937 rng(opt.seed);
  ComplexVector x = restrict(random_complex(op.size(), rng));
  x /= x.norm();
  double sigma = 0.0;
  for (int it = 0; it < opt.power_iterations; ++it) {
    const ComplexVector y = mu * C.C(R.solve(C.C_inv(x)));
    const ComplexVector z = restrict(std::conj(mu) * C.Ct_inv(R.solve_adjoint(C.Ct(y))));
    const double s = y.norm();
    const double zn = z.norm();
    if (!(zn > 0.0)) return s;
    x = z / zn;
    if (it > 2 && std::abs(s - sigma) <= opt.power_tol * s) return s;
    sigma = s;
  }
  return sigma;
}

SectorScanResult sector_scan(const OperatorMatrix& op, double beta,
                             const std::vector<double>& radii, double gamma,
                             const ScanOptions& opt) {
  if (!(beta > M_PI / 2 && beta < M_PI)) throw ConfigError("sector scan: beta must lie in (pi/2, pi)");
  SectorScanResult res;
  res.beta = beta;
  res.gamma = gamma;
  const double phis[] = {0.0, 0.5 * beta, beta - opt.angle_margin};
  for (double r : radii) {
    if (!(r > 0.0)) throw ConfigError("sector scan: radii must be positive");
    for (double phi : phis) {
      for (int sign : {1, -1}) {
        if (phi == 0.0 && sign < 0) continue;
        SectorSample s;
        s.phi = sign * phi;
        s.radius = r;
        const Complex mu = std::polar(r, s.phi);
        s.lambda = gamma + mu;
        try {
          s.bound = scaled_resolvent_norm(op, s.lambda, mu, opt);
          if (!std::isfinite(s.bound)) s.singular = true;
        } catch (const SolverError&) {
          s.singular = true;
        }
        if (s.singular) {
          s.bound = std::numeric_limits<double>::infinity();
          ++res.singular_count;
        }
        res.M_hat = std::max(res.M_hat, s.bound);
        res.samples.push_back(s);
      }
    }
  }
  return res;
}

GammaSearch find_gamma(const OperatorMatrix& op, double beta, const std::vector<double>& radii,
                       double cap, double gamma0, int max_attempts, const ScanOptions& opt) {
  GammaSearch out;
  double gamma = 0.0;
  for (int a = 0; a < max_attempts; ++a) {
    out.attempts = a + 1;
    out.gamma = gamma;
    out.scan = sector_scan(op, beta, radii, gamma, opt);
    if (out.scan.pass(cap)) {
      out.found = true;
      return out;
    }
    gamma = gamma == 0.0 ? gamma0 : 2.0 * gamma;
  }
  return out;
}

PerturbationReport perturbation_check(const OperatorMatrix& A0, const OperatorMatrix& B,
                                      double M_hat, unsigned seed, int samples) {
  PerturbationReport rep;
  rep.M_hat = M_hat;
  rep.samples = samples;
  if (B.A.nonZeros() == 0 || B.A.norm() == 0.0) {
    rep.condition = true;
    return rep;
  }
  const Eigen::Index N = A0.size();
  auto enorm = [&](const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(A0.energy * x))); };
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(samples, 2);
  Eigen::VectorXd rhs(samples);
  SparseMatrix I(N, N);
  I.setIdentity();
  const int levels = 8;
  std::vector<Eigen::SparseLU<SparseMatrix>> smoothers(levels);
  for (int l = 0; l < levels; ++l) {
    smoothers[l].compute(std::pow(10.0, l - 1) * I - A0.A);
    if (smoothers[l].info() != Eigen::Success) throw SolverError("perturbation check: smoother singular", 0.0);
  }
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd r(N);
    for (Eigen::Index i = 0; i < N; ++i) r[i] = nd(rng);
    Eigen::VectorXd x = smoothers[s % levels].solve(r);
    x /= enorm(x);
    M(s, 0) = enorm(A0.A * x);
    M(s, 1) = 1.0;
    rhs[s] = enorm(B.A * x);
  }
  Eigen::Vector2d ab = M.colPivHouseholderQr().solve(rhs);
  if (ab[0] < 0.0) ab = {0.0, rhs.mean()};
  if (ab[1] < 0.0) ab = {M.col(0).dot(rhs) / M.col(0).squaredNorm(), 0.0};
  rep.a = ab[0];
  rep.b = ab[1];
  rep.condition = rep.a * M_hat * M_hat < 1.0;
  return rep;
}

}  // namespace fsilab

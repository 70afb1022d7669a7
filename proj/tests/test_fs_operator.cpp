#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "doctest.h"
#include "fsilab/errors.hpp"
#include "fsilab/fs_operator.hpp"
#include "support.hpp"

using namespace fsilab;

namespace {

struct Fixture {
  Grid2D g{1.0, 1.0, 8, 8};
  DiffOps ops = diff_ops(g);
  PhysParams p{};
  OperatorSplit split = assemble_AFS_split(g, ops, p);
  const OperatorMatrix& A() const { return split.full; }
};

ComplexVector random_complex(Eigen::Index n, unsigned seed) {
  return testing::random_vector(n, seed).cast<Complex>() +
         Complex(0.0, 1.0) * testing::random_vector(n, seed + 1).cast<Complex>();
}

}  // namespace

TEST_CASE("block layout and pack/unpack round trip") {
  Fixture f;
  const BlockLayout& L = f.A().layout;
  const int nn = f.g.node_count(), ni = static_cast<int>(f.g.interior_nodes().size());
  CHECK(L.size == 2 * nn + 2 * ni + 2 * (f.g.nx() - 1));
  CHECK(f.A().size() == L.size);
  const Eigen::VectorXd x = testing::random_vector(L.size, 4);
  CHECK((pack(f.g, L, unpack(f.g, L, x)) - x).cwiseAbs().maxCoeff() == 0.0);
  const FullState s = unpack(f.g, L, x);
  for (int i = 0; i <= f.g.nx(); ++i) CHECK(s.v.y[f.g.index(i, f.g.ny())] == s.eta2[i]);
  CHECK(s.eta1[0] == 0.0);
}

TEST_CASE("split sums to the full operator") {
  Fixture f;
  CHECK(SparseMatrix(f.split.full.A - f.split.a0.A - f.split.b.A).norm() == 0.0);
}

TEST_CASE("manufactured rows: temperature and density couplings act as assembled") {
  Fixture f;
  const BlockLayout& L = f.A().layout;
  FullState s = FullState::zeros(f.g);
  s.theta = sample(f.g, [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y) + x * y; });
  FullState r = unpack(f.g, L, f.A().A * pack(f.g, L, s));
  CHECK((r.theta - f.p.kappa_bar() * (f.ops.laplacian * s.theta)).cwiseAbs().maxCoeff() < 1e-12);
  const ScalarField dth = f.ops.dx * s.theta;
  const BeamField top = f.g.top_trace(s.theta);
  for (int k : f.g.interior_nodes()) CHECK(r.v.x[k] == doctest::Approx(-f.p.R0 * dth[k]));
  for (int i = 1; i < f.g.nx(); ++i) CHECK(r.eta2[i] == doctest::Approx(f.p.R0 * f.p.rho_bar * top[i]));
  CHECK(r.rho.cwiseAbs().maxCoeff() == 0.0);

  s = FullState::zeros(f.g);
  for (int k : f.g.interior_nodes()) {
    const double x = f.g.x(f.g.col(k)), y = f.g.y(f.g.row(k));
    s.v.x[k] = std::sin(M_PI * x) * std::sin(M_PI * y);
  }
  r = unpack(f.g, L, f.A().A * pack(f.g, L, s));
  CHECK((r.rho + f.p.rho_bar * (f.ops.div_x * s.v.x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("plate operator is the clamped damped plate generator") {
  Fixture f;
  const OperatorMatrix P = plate_operator(f.g, f.ops);
  const int m = f.g.nx() - 1;
  const Eigen::VectorXd e1 = testing::random_vector(m, 8), e2 = testing::random_vector(m, 9);
  Eigen::VectorXd x(2 * m);
  x << e1, e2;
  const Eigen::VectorXd y = P.A * x;
  CHECK((y.head(m) - e2).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXd ref = -(f.ops.beam_bilaplacian * e1) + f.ops.beam_laplacian * e2;
  CHECK((y.tail(m) - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
  CHECK(P.constraints.empty());
}

TEST_CASE("constraint functionals are left null vectors, so X_m is invariant") {
  Fixture f;
  for (const auto& ell : f.A().constraints) {
    const Eigen::VectorXd r = f.A().A.transpose() * ell;
    CHECK(r.cwiseAbs().maxCoeff() < 1e-12 * Eigen::MatrixXd(f.A().A).cwiseAbs().maxCoeff());
  }
  const Eigen::VectorXd x = project_Xm(f.g, f.A(), testing::random_vector(f.A().size(), 12));
  for (const auto& ell : f.A().constraints) CHECK(std::abs(ell.dot(x)) < 1e-12);
  const Eigen::VectorXd Ax = f.A().A * x;
  for (const auto& ell : f.A().constraints) CHECK(std::abs(ell.dot(Ax)) < 1e-10 * Ax.norm());
  const Eigen::MatrixXd Q = Xm_basis(f.A());
  CHECK(Q.cols() == f.A().size() - 2);
  CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kernel on the full space has the dimension of the constraints") {
  Fixture f;
  CHECK(kernel_dimension(f.A()) == 2);
  CHECK_THROWS_AS(Resolvent(f.A(), Complex(0.0, 0.0)), SolverError);
  OperatorMatrix xm = f.A();
  xm.domain = Domain::Xm;
  const Resolvent R(xm, Complex(0.0, 0.0));
  CHECK(R.condition_estimate() < 1e13);
}

TEST_CASE("energy dissipativity on X_m: Q^T (E A + A^T E) Q is negative semidefinite") {
  Fixture f;
  const Eigen::MatrixXd E(f.A().energy), A(f.A().A), Q = Xm_basis(f.A());
  const Eigen::MatrixXd S = Q.transpose() * (E * A + A.transpose() * E) * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  CHECK(es.eigenvalues().maxCoeff() <= 1e-12 * S.cwiseAbs().maxCoeff());
}

TEST_CASE("resolvent: residual, first identity and adjoint") {
  Fixture f;
  const Complex l(0.7, 2.0), m(-0.1, -3.0);
  const ComplexVector b = random_complex(f.A().size(), 21), c = random_complex(f.A().size(), 31);
  const Resolvent Rl(f.A(), l), Rm(f.A(), m);
  const ComplexVector x = Rl.solve(b);
  const ComplexVector res = l * x - f.A().A.cast<Complex>() * x - b;
  CHECK(res.norm() < 1e-10 * b.norm());
  const ComplexVector lhs = Rl.solve(b) - Rm.solve(b);
  const ComplexVector rhs = (m - l) * Rl.solve(Rm.solve(b));
  CHECK((lhs - rhs).norm() < 1e-9 * lhs.norm());
  CHECK(std::abs(c.dot(Rl.solve(b)) - Rl.solve_adjoint(c).dot(b)) < 1e-9 * std::abs(c.dot(Rl.solve(b))));
}

TEST_CASE("restricted spectrum: eigenpair residuals, conjugate symmetry, stability") {
  Fixture f;
  const Eigen::MatrixXd M = restrict_dense(f.A());
  const Eigenpairs ep = eigenpairs(M);
  const double scale = M.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (size_t j = 0; j < ep.values.size(); ++j) {
    const ComplexVector v = ep.vectors.col(static_cast<Eigen::Index>(j));
    worst = std::max(worst, (M.cast<Complex>() * v - ep.values[j] * v).norm());
  }
  CHECK(worst < 1e-9 * scale);
  CHECK(max_real_part(ep.values) < 0.0);
  double im_sum = 0.0;
  for (const auto& z : ep.values) im_sum += z.imag();
  CHECK(std::abs(im_sum) < 1e-8 * scale);
}

TEST_CASE("plate auxiliary matrix is nonsingular and symmetric positive definite") {
  Fixture f;
  const Eigen::MatrixXd M = plate_auxiliary_matrix(f.g, f.ops, f.p);
  const auto sv = singular_values(M);
  CHECK(*std::min_element(sv.begin(), sv.end()) > 1e-6 * *std::max_element(sv.begin(), sv.end()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("perturbation fit recovers B = eps A0") {
  Fixture f;
  OperatorMatrix B = f.split.a0;
  const double eps = 0.05;
  B.A = eps * f.split.a0.A;
  const PerturbationReport r = perturbation_check(f.split.a0, B, 2.0, 11, 24);
  CHECK(r.a == doctest::Approx(eps).epsilon(0.02));
  CHECK(r.b < 1e-3 * eps);
  CHECK(r.condition);
  CHECK(r.samples > 0);
}

TEST_CASE("sector bounds tend to one at large radius and the plate scan is clean") {
  Fixture f;
  const Complex far(1e4, 0.0);
  CHECK(scaled_resolvent_norm(f.split.a0, far, far) == doctest::Approx(1.0).epsilon(0.01));
  OperatorMatrix xm = f.A();
  xm.domain = Domain::Xm;
  for (double phi : {0.0, 1.0, 1.9}) {
    const Complex l = std::polar(1e6, phi);
    CHECK(scaled_resolvent_norm(xm, l, l) == doctest::Approx(1.0).epsilon(0.01));
  }
  const OperatorMatrix P = plate_operator(f.g, f.ops);
  const SectorScanResult s = sector_scan(P, 2.0, {1e-2, 1.0, 1e2}, 0.0);
  CHECK(s.singular_count == 0);
  CHECK(s.samples.size() == 3 * 5);
  CHECK(s.M_hat >= 1.0 - 1e-6);
  CHECK(s.pass(1e3));
}

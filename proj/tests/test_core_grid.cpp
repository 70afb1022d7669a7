#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fsilab/chgvar.hpp"
#include "fsilab/diff_ops.hpp"
#include "fsilab/errors.hpp"
#include "fsilab/norms.hpp"
#include "support.hpp"

using namespace fsilab;

TEST_CASE("grid indexing, classes and trapezoid weights") {
  const Grid2D g(2.0, 1.5, 8, 6);
  CHECK(g.node_count() == 9 * 7);
  CHECK(g.index(3, 4) == 4 * 9 + 3);
  CHECK(g.col(g.index(5, 2)) == 5);
  CHECK(g.row(g.index(5, 2)) == 2);
  CHECK(g.y(g.ny()) == 0.0);
  CHECK(g.y(0) == doctest::Approx(-1.5));
  CHECK(g.weights().sum() == doctest::Approx(g.area()).epsilon(1e-14));
  CHECK(g.beam_weights().sum() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.interior_nodes().size() == 7u * 5u);
  CHECK(g.gamma_s_nodes().size() + g.gamma_0_nodes().size() + g.interior_nodes().size() ==
        static_cast<size_t>(g.node_count()));
  for (int k : g.gamma_s_nodes()) CHECK(g.row(k) == g.ny());
  double perimeter = 0.0;
  for (const auto& f : g.boundary_faces()) perimeter += f.length;
  CHECK(perimeter == doctest::Approx(2 * (2.0 + 1.5)).epsilon(1e-14));
}

TEST_CASE("grid rejects degenerate sizes") {
  CHECK_THROWS_AS(Grid2D(1.0, 1.0, 3, 8), ConfigError);
  CHECK_THROWS_AS(Grid2D(0.0, 1.0, 8, 8), ConfigError);
}

TEST_CASE("first derivatives are exact on quadratics") {
  const Grid2D g(1.0, 1.0, 10, 12);
  const DiffOps ops = diff_ops(g);
  const ScalarField f = sample(g, [](double x, double y) { return 1 + 2 * x - y + 3 * x * x + x * y - 2 * y * y; });
  const ScalarField fx = sample(g, [](double x, double y) { return 2 + 6 * x + y; });
  const ScalarField fy = sample(g, [](double x, double y) { return -1 + x - 4 * y; });
  CHECK((ops.dx * f - fx).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((ops.dy * f - fy).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("summation by parts: weighted divergence equals boundary flux") {
  const Grid2D g(1.3, 0.7, 9, 11);
  const DiffOps ops = diff_ops(g);
  const Eigen::VectorXd u = testing::random_vector(g.node_count(), 3);
  const Eigen::VectorXd W = g.weights();
  double right = 0.0, left = 0.0, top = 0.0, bottom = 0.0;
  for (int j = 0; j <= g.ny(); ++j) {
    right += g.wy(j) * u[g.index(g.nx(), j)];
    left += g.wy(j) * u[g.index(0, j)];
  }
  for (int i = 0; i <= g.nx(); ++i) {
    top += g.wx(i) * u[g.index(i, g.ny())];
    bottom += g.wx(i) * u[g.index(i, 0)];
  }
  CHECK(W.dot(ops.div_x * u) == doctest::Approx(right - left).epsilon(1e-12));
  CHECK(W.dot(ops.div_y * u) == doctest::Approx(top - bottom).epsilon(1e-12));
}

TEST_CASE("Neumann Laplacian annihilates constants and conserves the integral") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  CHECK((ops.laplacian * ScalarField::Ones(g.node_count())).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::VectorXd u = testing::random_vector(g.node_count(), 5);
  const double scale = (ops.laplacian * u).cwiseAbs().maxCoeff();
  CHECK(std::abs(g.weights().dot(ops.laplacian * u)) < 1e-12 * scale);
}

TEST_CASE("beam bilaplacian is symmetric positive definite, beam Laplacian negative definite") {
  const Grid2D g(1.0, 1.0, 12, 6);
  const DiffOps ops = diff_ops(g);
  const Eigen::MatrixXd D4(ops.beam_bilaplacian), D2(ops.beam_laplacian);
  CHECK((D4 - D4.transpose()).cwiseAbs().maxCoeff() < 1e-9 * D4.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e4(D4), e2(D2);
  CHECK(e4.eigenvalues().minCoeff() > 0.0);
  CHECK(e2.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("lowest clamped beam eigenvalue converges to (4.7300407 / L)^4") {
  const Grid2D g(1.0, 1.0, 48, 4);
  const Eigen::MatrixXd D4(diff_ops(g).beam_bilaplacian);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e4(D4);
  CHECK(e4.eigenvalues().minCoeff() == doctest::Approx(std::pow(4.7300407, 4)).epsilon(0.01));
}

TEST_CASE("conormal flux of a linear field and its boundary load") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  const MatrixField I(g.node_count(), Matrix2::Identity());
  const ScalarField th = g.xs();
  const BoundaryField flux = conormal_flux(g, ops, I, th);
  const auto& faces = g.boundary_faces();
  REQUIRE(flux.size() == static_cast<Eigen::Index>(faces.size()));
  for (size_t f = 0; f < faces.size(); ++f) CHECK(flux[f] == doctest::Approx(faces[f].nx).epsilon(1e-12));
  CHECK(std::abs(boundary_load(g, flux).sum()) < 1e-12);
}

TEST_CASE("discrete norms of constants and time weights") {
  const Grid2D g(2.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  const ScalarField c = ScalarField::Constant(g.node_count(), 3.0);
  CHECK(discrete_norm(g, ops, c, {0, 2.0, 2.0, 0.0}) == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(discrete_norm(g, ops, c, {1, 4.0, 2.0, 0.0}) == doctest::Approx(3.0 * std::pow(2.0, 0.25)));
  const std::vector<double> s{1.0, 1.0, 1.0};
  CHECK(weighted_time_norm(s, 0.5, {0, 2.0, NormSpec::infinity, 0.0}) == doctest::Approx(1.0));
  CHECK(weighted_time_norm(s, 0.5, {0, 2.0, NormSpec::infinity, 2.0}) == doctest::Approx(std::exp(2.0)));
  CHECK_THROWS_AS(validate(NormSpec{0, 0.5, 2.0, 0.0}), ConfigError);
}

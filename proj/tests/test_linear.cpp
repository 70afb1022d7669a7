#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fsilab/linear.hpp"
#include "fsilab/run.hpp"
#include "support.hpp"

using namespace fsilab;

namespace {

BeamField pluck(const Grid2D& g, double a) {
  return sample_beam(g, [&](double x) { return a * 16 * x * x * (1 - x) * (1 - x); });
}

}  // namespace

TEST_CASE("heat and velocity steppers converge at second order in space") {
  for (StepperId id : {StepperId::heat, StepperId::velocity}) {
    const ConvergenceStudy s = manufactured_convergence(id, {16, 32, 64});
    INFO(to_string(id));
    REQUIRE(s.orders.size() == 2);
    CHECK(s.kind == "spatial");
    for (double o : s.orders) CHECK(o == doctest::Approx(2.0).epsilon(0.1));
    CHECK(s.errors[2] < s.errors[0]);
  }
}

TEST_CASE("plate stepper is first order in time under backward Euler") {
  const ConvergenceStudy s = manufactured_convergence(StepperId::plate, {20, 40, 80});
  CHECK(s.kind == "temporal");
  for (double o : s.orders) CHECK(o == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("unforced plate energy never increases") {
  const Grid2D g(1.0, 1.0, 16, 4);
  const DiffOps ops = diff_ops(g);
  const BeamField zero = BeamField::Zero(g.beam_node_count());
  for (TimeScheme scheme : {TimeScheme::backward_euler, TimeScheme::crank_nicolson}) {
    for (double dt : {1e-1, 1e-2, 1e-3}) {
      const PlateStepper plate(g, ops, dt, scheme);
      BeamField e1 = pluck(g, 0.1), e2 = pluck(g, 0.05);
      double E = plate.energy(e1, e2);
      int violations = 0;
      for (int n = 0; n < 500; ++n) {
        std::tie(e1, e2) = plate.step(e1, e2, zero);
        const double En = plate.energy(e1, e2);
        if (En > E * (1 + 1e-13)) ++violations;
        E = En;
      }
      CHECK(violations == 0);
      CHECK(e1[0] == 0.0);
      CHECK(e1[g.nx()] == 0.0);
    }
  }
}

TEST_CASE("density update matches the closed form to round-off") {
  CHECK(density_closed_form_error(16, 1e-2, 20) <= 1e-12);
  CHECK(density_closed_form_error(32, 1e-3, 5) <= 1e-12);
}

TEST_CASE("temperature with zero flux and zero source keeps its integral") {
  const Grid2D g(1.0, 1.0, 12, 12);
  const DiffOps ops = diff_ops(g);
  const DiffeoMap X0 = identity_map(g);
  const ScalarField rho0 = ScalarField::Ones(g.node_count());
  const TemperatureStepper heat(g, ops, PhysParams{}, X0.metrics(), rho0, 1e-2, 0.0);
  ScalarField th = scenario_library(g, "thermal-spot", 1.0).theta;
  const double I0 = integrate(g, th);
  const ScalarField zero = ScalarField::Zero(g.node_count());
  const BoundaryField g0 = BoundaryField::Zero(static_cast<Eigen::Index>(g.boundary_faces().size()));
  for (int n = 0; n < 50; ++n) th = heat.step(th, zero, g0);
  CHECK(integrate(g, th) == doctest::Approx(I0).epsilon(1e-12));
  CHECK(th.maxCoeff() - th.minCoeff() < 0.5 * (scenario_library(g, "thermal-spot", 1.0).theta.maxCoeff()));
}

TEST_CASE("temperature shift gamma1 damps a constant at rate gamma1") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  const ScalarField rho0 = ScalarField::Ones(g.node_count());
  const double dt = 1e-3;
  const TemperatureStepper heat(g, ops, PhysParams{}, identity_map(g).metrics(), rho0, dt, 2.0);
  ScalarField th = ScalarField::Ones(g.node_count());
  const ScalarField zero = ScalarField::Zero(g.node_count());
  const BoundaryField g0 = BoundaryField::Zero(static_cast<Eigen::Index>(g.boundary_faces().size()));
  for (int n = 0; n < 100; ++n) th = heat.step(th, zero, g0);
  CHECK(th.mean() == doctest::Approx(std::pow(1.0 / (1.0 + 2.0 * dt), 100)).epsilon(1e-12));
}

TEST_CASE("velocity stepper carries the plate trace and rests without data") {
  const Grid2D g(1.0, 1.0, 10, 10);
  const DiffOps ops = diff_ops(g);
  const PhysParams p;
  const ScalarField rho0 = ScalarField::Ones(g.node_count());
  const VelocityStepper vel(g, ops, p, identity_map(g).metrics(), rho0, 1e-2);
  const VectorField zero = VectorField::zeros(g.node_count());
  const BeamField bz = BeamField::Zero(g.beam_node_count());
  CHECK(testing::max_abs(FullState{zero.x, vel.step(zero, bz, bz, zero), zero.x, bz, bz}) == 0.0);
  const BeamField e2 = pluck(g, 0.3);
  const VectorField v = vel.step(zero, bz, e2, zero);
  for (int i = 0; i <= g.nx(); ++i) {
    CHECK(v.y[g.index(i, g.ny())] == doctest::Approx(e2[i]));
    CHECK(v.x[g.index(i, g.ny())] == 0.0);
  }
  for (int k : g.gamma_0_nodes()) {
    CHECK(v.x[k] == 0.0);
    CHECK(v.y[k] == 0.0);
  }
}

TEST_CASE("Lame operator on interior nodes is symmetric negative definite") {
  const Grid2D g(1.0, 1.0, 6, 6);
  PhysParams p;
  p.alpha = 0.5;
  const Eigen::MatrixXd L(lame_matrix(g, p));
  const int N = g.node_count();
  std::vector<int> idx;
  for (int c = 0; c < 2; ++c)
    for (int k : g.interior_nodes()) idx.push_back(c * N + k);
  Eigen::MatrixXd Lii(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) Lii(i, j) = L(idx[i], idx[j]);
  const double scale = Lii.cwiseAbs().maxCoeff();
  CHECK((Lii - Lii.transpose()).cwiseAbs().maxCoeff() < 1e-12 * scale);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lii);
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
  // Constant fields are annihilated by every row.
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(2 * N);
  shift.head(N).setOnes();
  CHECK((L * shift).cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("Crank-Nicolson step source averages the two levels") {
  const std::vector<double> s{1.0, 3.0, 7.0};
  CHECK(step_source(s, 1, TimeScheme::backward_euler) == 7.0);
  CHECK(step_source(s, 1, TimeScheme::crank_nicolson) == 5.0);
  CHECK(implicit_weight(TimeScheme::crank_nicolson) == 0.5);
}

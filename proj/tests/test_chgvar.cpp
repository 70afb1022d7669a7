#include <cmath>

#include "doctest.h"
#include "fsilab/chgvar.hpp"
#include "fsilab/errors.hpp"
#include "metric_oracle.hpp"
#include "support.hpp"

using namespace fsilab;

TEST_CASE("metrics of five analytic maps match independent references") {
  for (const auto& d : testing::metric_oracle_suite(32)) {
    INFO(d.name);
    CHECK(d.B <= 1e-8);
    CHECK(d.delta <= 1e-8);
    CHECK(d.A <= 1e-8);
  }
}

TEST_CASE("metric identities: B^T grad X = delta I and A symmetric positive") {
  const Grid2D g(1.0, 1.0, 8, 8);
  MatrixField F(g.node_count());
  for (int k = 0; k < g.node_count(); ++k) F[k] << 1.2 + 0.01 * k, 0.3, -0.2, 0.9;
  const Metrics m = metric_tensors(F);
  for (int k = 0; k < g.node_count(); ++k) {
    CHECK((m.B[k].transpose() * F[k] - m.delta[k] * Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m.A[k] - m.A[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.A[k].determinant() == doctest::Approx(1.0).epsilon(1e-13));
  }
  F[3] << 0.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(metric_tensors(F), DiffeoFailure);
}

TEST_CASE("cutoff profile is one on the inner band, zero outside, C^2 at the joins") {
  const Grid2D g(1.0, 1.0, 16, 16);
  const CutoffProfile chi = make_cutoff(g, -0.75, 0.75, 0.5);
  CHECK(chi.value(0.0) == 1.0);
  CHECK(chi.value(chi.inner_low()) == doctest::Approx(1.0));
  CHECK(chi.value(-0.8) == 0.0);
  CHECK(chi.value(0.8) == 0.0);
  const double h = 1e-5;
  for (double y : {-0.75, chi.inner_low(), chi.inner_high(), 0.75}) {
    INFO("join at " << y);
    CHECK(std::abs(chi.value(y + h) - chi.value(y - h)) < 1e-8);
    CHECK(std::abs(chi.slope(y + h) - chi.slope(y - h)) < 1e-6);
    // One-sided second derivatives, Richardson extrapolated.
    auto one_sided = [&](double s, double d) { return s * (chi.slope(y + s * d) - chi.slope(y)) / d; };
    const double d = 1e-4;
    const double curv_r = 2 * one_sided(1, d / 2) - one_sided(1, d);
    const double curv_l = 2 * one_sided(-1, d / 2) - one_sided(-1, d);
    CHECK(std::abs(curv_r - curv_l) < 1e-3);
  }
  for (double y = -0.74; y < -0.38; y += 0.01) {
    const double fd = (chi.value(y + h) - chi.value(y - h)) / (2 * h);
    CHECK(chi.slope(y) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("initial map moves the interface onto the deflection and passes the certificate") {
  const Grid2D g(1.0, 1.0, 16, 16);
  const DiffOps ops = diff_ops(g);
  const BeamField eta = sample_beam(g, [](double x) { return 0.1 * 16 * x * x * (1 - x) * (1 - x); });
  const DiffeoMap X0 = initial_diffeo(g, ops, eta, make_cutoff(g), 64);
  for (int i = 0; i <= g.nx(); ++i) {
    CHECK(X0.X.y[g.index(i, g.ny())] == doctest::Approx(eta[i]).epsilon(1e-12));
    CHECK(X0.X.x[g.index(i, g.ny())] == doctest::Approx(g.x(i)));
  }
  for (int i = 0; i <= g.nx(); ++i) CHECK(X0.X.y[g.index(i, 0)] == doctest::Approx(-1.0));
  const DiffeoCertificate cert = check_diffeo(X0, default_c0(X0));
  CHECK(cert.pass);
  CHECK(cert.min_delta > 0.0);
  CHECK(default_c0(X0) == doctest::Approx(0.5 * X0.delta.minCoeff()));
}

TEST_CASE("initial map rejects deflections outside the band and unclamped ends") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  const BeamField big = sample_beam(g, [](double x) { return 0.6 * std::sin(M_PI * x); });
  CHECK_THROWS_AS(initial_diffeo(g, ops, big, make_cutoff(g), 16), GeometryError);
  const BeamField loose = sample_beam(g, [](double x) { return 0.1 + 0.0 * x; });
  CHECK_THROWS_AS(initial_diffeo(g, ops, loose, make_cutoff(g), 16), GeometryError);
}

TEST_CASE("map update: rest keeps X0, uniform translation keeps the metrics, tracker agrees") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  const DiffeoMap X0 = identity_map(g);
  const VectorField zero = VectorField::zeros(g.node_count());
  const DiffeoMap same = update_map(ops, X0, {zero, zero, zero}, 0.1, 0.5);
  CHECK((same.X.x - X0.X.x).cwiseAbs().maxCoeff() == 0.0);
  VectorField shift = zero;
  shift.x.setConstant(0.3);
  const DiffeoMap moved = update_map(ops, X0, {shift, shift, shift}, 0.1, 0.5);
  CHECK((moved.X.x - X0.X.x).cwiseAbs().maxCoeff() == doctest::Approx(0.06));
  CHECK((moved.delta - X0.delta).cwiseAbs().maxCoeff() < 1e-14);

  VectorField swirl = zero;
  for (int k = 0; k < g.node_count(); ++k) {
    swirl.x[k] = 0.2 * g.x(g.col(k)) * g.y(g.row(k));
    swirl.y[k] = -0.1 * g.x(g.col(k));
  }
  const std::vector<VectorField> hist{zero, swirl, 2.0 * swirl, swirl};
  const DiffeoMap ref = update_map(ops, X0, hist, 0.05, 0.1);
  MapTracker tr(ops, X0, 0.1);
  for (size_t n = 1; n < hist.size(); ++n) tr.advance(hist[n - 1], hist[n], 0.05);
  CHECK((tr.current().X.x - ref.X.x).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((tr.current().delta - ref.delta).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("map update signals a collapsing Jacobian") {
  const Grid2D g(1.0, 1.0, 8, 8);
  const DiffOps ops = diff_ops(g);
  VectorField squeeze = VectorField::zeros(g.node_count());
  squeeze.x = -10.0 * g.xs();
  CHECK_THROWS_AS(update_map(ops, identity_map(g), {squeeze, squeeze}, 0.1, 0.5), DiffeoFailure);
}

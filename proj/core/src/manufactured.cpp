#include <cmath>
#include <numbers>
#include <tuple>

#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {

std::string to_string(StepperId id) {
  switch (id) {
    case StepperId::heat:
      return "heat";
    case StepperId::velocity:
      return "velocity";
    case StepperId::plate:
      return "plate";
  }
  return "unknown";
}

namespace {

constexpr double pi = std::numbers::pi;

double l2(const Grid2D& g, const Eigen::VectorXd& e) {
  return std::sqrt(g.weights().dot(e.cwiseProduct(e)));
}

double heat_error(int n, const PhysParams& p) {
  const Grid2D g(1.0, 1.0, n, n);
  const DiffOps ops = diff_ops(g);
  const double T = 0.25;
  const int steps = 2 * n;
  const double dt = T / steps;
  const ScalarField rho0 = ScalarField::Ones(g.node_count());
  const DiffeoMap id = identity_map(g);
  const TemperatureStepper stepper(g, ops, p, id.metrics(), rho0, dt, 0.0,
                                   TimeScheme::crank_nicolson);
  const double c = p.kappa / p.cv;
  auto exact = [&](double t) {
    return sample(g, [&](double x, double y) { return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y); });
  };
  auto source = [&](double t) { return ScalarField((-1.0 + 2.0 * pi * pi * c) * exact(t)); };
  auto flux = [&](double t) {
    const auto& faces = g.boundary_faces();
    BoundaryField out(static_cast<Eigen::Index>(faces.size()));
    for (size_t f = 0; f < faces.size(); ++f) {
      const int k = faces[f].node;
      const double x = g.x(g.col(k)), y = g.y(g.row(k));
      const double tx = pi * std::cos(pi * x) * std::sin(pi * y);
      const double ty = pi * std::sin(pi * x) * std::cos(pi * y);
      out[static_cast<Eigen::Index>(f)] = std::exp(-t) * (faces[f].nx * tx + faces[f].ny * ty);
    }
    return out;
  };
  ScalarField theta = exact(0.0);
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * dt, t1 = (s + 1) * dt;
    theta = stepper.step(theta, 0.5 * (source(t0) + source(t1)), 0.5 * (flux(t0) + flux(t1)));
  }
  return l2(g, theta - exact(T));
}

double velocity_error(int n, const PhysParams& p) {
  const Grid2D g(1.0, 1.0, n, n);
  const DiffOps ops = diff_ops(g);
  const double T = 0.25;
  const int steps = 2 * n;
  const double dt = T / steps;
  const ScalarField rho0 = ScalarField::Ones(g.node_count());
  const DiffeoMap id = identity_map(g);
  const VelocityStepper stepper(g, ops, p, id.metrics(), rho0, dt, TimeScheme::crank_nicolson);
  auto exact = [&](double t) {
    return VectorField{
        sample(g, [&](double x, double y) { return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y); }),
        ScalarField::Zero(g.node_count())};
  };
  auto source = [&](double t) {
    const double a = -1.0 + (3.0 * p.mu + p.alpha) * pi * pi;
    return VectorField{
        sample(g, [&](double x, double y) { return a * std::exp(-t) * std::sin(pi * x) * std::sin(pi * y); }),
        sample(g, [&](double x, double y) {
          return -(p.mu + p.alpha) * pi * pi * std::exp(-t) * std::cos(pi * x) * std::cos(pi * y);
        })};
  };
  const BeamField zero = BeamField::Zero(g.beam_node_count());
  VectorField v = exact(0.0);
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * dt, t1 = (s + 1) * dt;
    v = stepper.step(v, zero, zero, 0.5 * (source(t0) + source(t1)));
  }
  const VectorField e = v - exact(T);
  return std::sqrt(std::pow(l2(g, e.x), 2) + std::pow(l2(g, e.y), 2));
}

// Forced family eta = p(x) e^{-t} with h built from the discrete operators, so the
// semi-discrete solution is exact and only the time error remains.
double plate_error(int steps) {
  const Grid2D g(1.0, 1.0, 32, 4);
  const DiffOps ops = diff_ops(g);
  const double T = 2.0;
  const double dt = T / steps;
  const PlateStepper stepper(g, ops, dt, TimeScheme::backward_euler);
  const BeamField p = sample_beam(g, [](double x) { return 16.0 * x * x * (1 - x) * (1 - x); });
  const BeamField shape = p + apply_beam_bilaplacian(ops, p) + apply_beam_laplacian(ops, p);
  BeamField e1 = p, e2 = -p;
  for (int s = 0; s < steps; ++s) std::tie(e1, e2) = stepper.step(e1, e2, std::exp(-(s + 1) * dt) * shape);
  return (e1 - std::exp(-T) * p).norm() * std::sqrt(g.hx());
}

}  // namespace

ConvergenceStudy manufactured_convergence(StepperId id, const std::vector<int>& resolutions,
                                          const PhysParams& p) {
  if (resolutions.size() < 2) throw ConfigError("manufactured_convergence: need two resolutions");
  ConvergenceStudy study;
  study.stepper = id;
  for (int r : resolutions) study.resolutions.push_back(r);
  if (id == StepperId::plate) {
    study.family = "16 x^2 (1 - x)^2 exp(-t), forced";
    study.kind = "temporal";
  } else {
    study.kind = "spatial";
    study.family = id == StepperId::heat ? "exp(-t) sin(pi x) sin(pi y), Neumann data"
                                         : "exp(-t) (sin(pi x) sin(pi y), 0), identity metrics";
  }
  for (int r : resolutions) {
    switch (id) {
      case StepperId::heat:
        study.errors.push_back(heat_error(r, p));
        break;
      case StepperId::velocity:
        study.errors.push_back(velocity_error(r, p));
        break;
      case StepperId::plate:
        study.errors.push_back(plate_error(r));
        break;
    }
  }
  for (size_t i = 0; i + 1 < study.errors.size(); ++i)
    study.orders.push_back(std::log(study.errors[i] / study.errors[i + 1]) /
                           std::log(study.resolutions[i + 1] / study.resolutions[i]));
  return study;
}

}  // namespace fsilab

#pragma once

#include <Eigen/SparseLU>
#include <string>
#include <utility>
#include <vector>

#include "fsilab/chgvar.hpp"
#include "fsilab/diff_ops.hpp"
#include "fsilab/grid.hpp"
#include "fsilab/params.hpp"

namespace fsilab {

enum class TimeScheme { backward_euler, crank_nicolson };

inline double implicit_weight(TimeScheme s) { return s == TimeScheme::backward_euler ? 1.0 : 0.5; }

// Sources for the linear cascade on a uniform time grid t_n = n dt.
// g holds one value per boundary face of the grid.
struct SourceBundle {
  std::vector<ScalarField> f1;
  std::vector<VectorField> f2;
  std::vector<ScalarField> f3;
  std::vector<BoundaryField> g;
  std::vector<BeamField> h;
  double dt = 0.0;

  size_t steps() const { return f1.empty() ? 0 : f1.size() - 1; }
  static SourceBundle zeros(const Grid2D& grid, int steps, double dt);
};

// Time-step source for a theta-scheme: new level for BE, average for CN.
template <class T>
T step_source(const std::vector<T>& s, size_t n, TimeScheme scheme) {
  if (scheme == TimeScheme::backward_euler) return s[n + 1];
  return T(0.5 * (s[n] + s[n + 1]));
}

// Damped clamped plate d/dt (eta1, eta2) = (eta2, -D^4 eta1 + D^2 eta2 + h).
class PlateStepper {
 public:
  PlateStepper(const Grid2D& g, const DiffOps& ops, double dt,
               TimeScheme scheme = TimeScheme::backward_euler);

  // h: step source on the beam (endpoint values ignored).
  std::pair<BeamField, BeamField> step(const BeamField& eta1, const BeamField& eta2,
                                       const BeamField& h) const;
  // E = 1/2 (|eta2|^2 + |D^2 eta1|^2) with the clamped ghost closure.
  double energy(const BeamField& eta1, const BeamField& eta2) const;
  // Generator on the interior beam unknowns (eta1, eta2).
  Eigen::MatrixXd generator() const { return Eigen::MatrixXd(A_); }
  double dt() const { return dt_; }

 private:
  const DiffOps* ops_;
  double dt_, theta_, h_;
  SparseMatrix A_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

std::pair<BeamField, BeamField> step_plate(const Grid2D& g, const DiffOps& ops,
                                           const BeamField& eta1, const BeamField& eta2,
                                           const BeamField& h, double dt,
                                           TimeScheme scheme = TimeScheme::backward_euler);

// Dirichlet velocity data: eta2 e2 on the top edge, zero on the rest.
VectorField velocity_trace(const Grid2D& g, const BeamField& eta2);

// dv/dt = (1 / (rho0 delta0)) div T0(v) + f2 with frozen metrics, Dirichlet
// rows carrying the trace data.
class VelocityStepper {
 public:
  VelocityStepper(const Grid2D& g, const DiffOps& ops, const PhysParams& p, const Metrics& m0,
                  const ScalarField& rho0, double dt,
                  TimeScheme scheme = TimeScheme::backward_euler);

  // eta2_old is only used by Crank-Nicolson. f2: step source.
  VectorField step(const VectorField& v, const BeamField& eta2_old, const BeamField& eta2_new,
                   const VectorField& f2) const;
  // L v at every node (boundary rows carry no meaning).
  VectorField apply_operator(const VectorField& v) const;

 private:
  const Grid2D* g_;
  double dt_, theta_;
  SparseMatrix L_, L_ff_, L_fb_;
  std::vector<int> free_, fixed_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

VectorField step_velocity(const Grid2D& g, const DiffOps& ops, const VectorField& v,
                          const BeamField& eta2, const VectorField& f2, const Metrics& m0,
                          const ScalarField& rho0, const PhysParams& p, double dt);

// d theta/dt + gamma1 theta = (kappa / (cv rho0 delta0)) div(A0 grad theta) + f3,
// with conormal flux A0 grad theta . n = g entering as a boundary load.
class TemperatureStepper {
 public:
  TemperatureStepper(const Grid2D& g, const DiffOps& ops, const PhysParams& p, const Metrics& m0,
                     const ScalarField& rho0, double dt, double gamma1,
                     TimeScheme scheme = TimeScheme::backward_euler);

  ScalarField step(const ScalarField& theta, const ScalarField& f3, const BoundaryField& g) const;
  ScalarField apply_operator(const ScalarField& theta, const BoundaryField& g) const;
  // Nodewise factor kappa / (cv rho0 delta0).
  const Eigen::VectorXd& coefficient() const { return c_; }

 private:
  const Grid2D* g_;
  double dt_, theta_, gamma1_;
  Eigen::VectorXd c_;
  SparseMatrix L_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

ScalarField step_temperature(const Grid2D& g, const DiffOps& ops, const ScalarField& theta,
                             const ScalarField& f3, const BoundaryField& bc, const Metrics& m0,
                             const ScalarField& rho0, const PhysParams& p, double dt,
                             double gamma1);

// -(rho0 / delta0) grad v : B0 at every node.
ScalarField density_rate(const DiffOps& ops, const VectorField& v, const Metrics& m0,
                         const ScalarField& rho0);
// Trapezoid-in-time nodewise update of d rho/dt + (rho0/delta0) grad v : B0 = f1.
ScalarField step_density(const DiffOps& ops, const ScalarField& rho, const VectorField& v_old,
                         const VectorField& v_new, const ScalarField& f1_old,
                         const ScalarField& f1_new, const Metrics& m0, const ScalarField& rho0,
                         double dt);

// Integrated Lame operator mu Laplace + (mu + alpha) grad div on all nodes.
SparseMatrix lame_matrix(const Grid2D& g, const PhysParams& p);
// Steady Lame problem with Dirichlet data eta2 e2 on the top edge.
VectorField solve_lift_Dv(const Grid2D& g, const BeamField& eta2, const PhysParams& p);

enum class StepperId { heat, velocity, plate };
std::string to_string(StepperId id);

struct ConvergenceStudy {
  StepperId stepper{};
  std::string family;
  std::string kind;  // "spatial" or "temporal"
  std::vector<double> resolutions;
  std::vector<double> errors;
  std::vector<double> orders;
};

// Heat: theta = e^{-t} sin(pi x) sin(pi y) with matching Neumann data.
// Velocity: v = e^{-t} (sin(pi x) sin(pi y), 0), identity metrics.
// Both march Crank-Nicolson with dt proportional to h and report spatial orders.
// Plate: forced clamped quartic family under backward Euler, temporal order;
// `resolutions` are then the numbers of steps.
ConvergenceStudy manufactured_convergence(StepperId id, const std::vector<int>& resolutions,
                                          const PhysParams& p = {});

}  // namespace fsilab

#pragma once

#include <vector>

#include "fsilab/diff_ops.hpp"
#include "fsilab/grid.hpp"

namespace fsilab {

struct Metrics {
  MatrixField B;          // Cof grad X
  Eigen::VectorXd delta;  // det grad X
  MatrixField A;          // B^T B / delta
};

// Lagrangian map samples together with their metric data.
struct DiffeoMap {
  VectorField X;
  MatrixField gradX;
  MatrixField B;
  Eigen::VectorXd delta;
  MatrixField A;

  Metrics metrics() const { return {B, delta, A}; }
};

// Vertical cutoff: chi = 1 for (1 - eps) lower <= y <= (1 - eps) upper, 0 outside
// (lower, upper), C^2 quintic blend between. It is constant in x: the displacement
// eta1 chi e2 already vanishes on the side walls because eta1 is clamped.
struct CutoffProfile {
  double lower = -0.75;
  double upper = 0.75;
  double epsilon = 0.5;
  ScalarField chi;

  double value(double y) const;
  double slope(double y) const;
  double inner_low() const { return (1.0 - epsilon) * lower; }
  double inner_high() const { return (1.0 - epsilon) * upper; }
};

CutoffProfile make_cutoff(const Grid2D& g, double lower, double upper, double epsilon);
CutoffProfile make_cutoff(const Grid2D& g);

// B = Cof grad X, delta = det grad X, A = B^T B / delta (symmetrized).
// Throws DiffeoFailure when delta <= 0 at some node.
Metrics metric_tensors(const MatrixField& gradX);

DiffeoMap identity_map(const Grid2D& g);
DiffeoMap map_from_gradient(VectorField X, MatrixField gradX);
// grad X by second-order differences of the samples.
DiffeoMap map_from_samples(const DiffOps& ops, const VectorField& X);

// Flow of Lambda = eta1_0(y1) chi(y) e2 over unit time by RK4. grad X comes from
// the variational equation integrated alongside. The slope of eta1_0 is taken
// from beam differences unless given explicitly.
DiffeoMap initial_diffeo(const Grid2D& g, const DiffOps& ops, const BeamField& eta1_0,
                         const CutoffProfile& chi, int n_flow_steps);
DiffeoMap initial_diffeo(const Grid2D& g, const BeamField& eta1_0, const BeamField& eta1_0_slope,
                         const CutoffProfile& chi, int n_flow_steps);

struct DiffeoCertificate {
  double min_delta = 0.0;
  double min_eig_A = 0.0;
  int worst_node = -1;
  bool pass = false;
};

DiffeoCertificate check_diffeo(const DiffeoMap& map, double c0);
// Half the smallest Jacobian of the initial map.
double default_c0(const DiffeoMap& X0);

// X(t) = X0 + trapezoid sum of the velocity history (uniform dt, first sample
// at t = 0). Throws DiffeoFailure when delta <= c0 at some node.
DiffeoMap update_map(const DiffOps& ops, const DiffeoMap& X0,
                     const std::vector<VectorField>& v_history, double dt, double c0);

// Incremental form of update_map for time marching.
class MapTracker {
 public:
  MapTracker(const DiffOps& ops, DiffeoMap X0, double c0);
  void advance(const VectorField& v_old, const VectorField& v_new, double dt);
  const DiffeoMap& current() const { return map_; }

 private:
  const DiffOps* ops_;
  DiffeoMap map_;
  double c0_;
};

}  // namespace fsilab

#pragma once

#include <Eigen/Core>
#include <vector>

namespace fsilab {

using ScalarField = Eigen::VectorXd;    // one value per fluid node
using BeamField = Eigen::VectorXd;      // one value per beam node (nx + 1)
using BoundaryField = Eigen::VectorXd;  // one value per boundary face

struct VectorField {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  static VectorField zeros(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
  Eigen::Index size() const { return x.size(); }
  VectorField& operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  VectorField& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.x - b.x, a.y - b.y};
}
inline VectorField operator*(double s, VectorField a) { return a *= s; }

enum class NodeClass { interior, gamma_s, gamma_0 };

// Half of a control-volume boundary lying on the domain boundary. Corner nodes
// own two faces with different normals.
struct BoundaryFace {
  int node;
  double nx;
  double ny;
  double length;
};

// Fluid domain [0, L] x [-H, 0]; the beam sits on the top edge y = 0.
// Node (i, j) has index j * (nx + 1) + i.
class Grid2D {
 public:
  Grid2D(double L, double H, int nx, int ny);

  double length() const { return L_; }
  double depth() const { return H_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  int node_count() const { return (nx_ + 1) * (ny_ + 1); }
  int beam_node_count() const { return nx_ + 1; }
  int index(int i, int j) const { return j * (nx_ + 1) + i; }
  int col(int k) const { return k % (nx_ + 1); }
  int row(int k) const { return k / (nx_ + 1); }

  double x(int i) const { return i * hx_; }
  double y(int j) const { return j == ny_ ? 0.0 : -(ny_ - j) * hy_; }
  double beam_x(int i) const { return x(i); }

  NodeClass classify(int k) const;
  bool on_boundary(int k) const;

  const std::vector<int>& interior_nodes() const { return interior_; }
  const std::vector<int>& gamma_s_nodes() const { return gamma_s_; }
  const std::vector<int>& gamma_0_nodes() const { return gamma_0_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }
  // Position of a node in interior_nodes(), or -1.
  int interior_slot(int k) const { return interior_slot_[k]; }

  // Trapezoid weights.
  double wx(int i) const { return (i == 0 || i == nx_) ? 0.5 * hx_ : hx_; }
  double wy(int j) const { return (j == 0 || j == ny_) ? 0.5 * hy_ : hy_; }
  double weight(int k) const { return wx(col(k)) * wy(row(k)); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& beam_weights() const { return beam_weights_; }
  double area() const { return L_ * H_; }

  // Node coordinates as fields.
  ScalarField xs() const;
  ScalarField ys() const;

  // Beam values on the top row, and the converse injection.
  BeamField top_trace(const ScalarField& f) const;

 private:
  double L_, H_;
  int nx_, ny_;
  double hx_, hy_;
  std::vector<int> interior_, gamma_s_, gamma_0_, interior_slot_;
  std::vector<BoundaryFace> faces_;
  Eigen::VectorXd weights_, beam_weights_;
};

Grid2D build_grid(double L, double H, int nx, int ny);

// Sample a function of (x, y) on the fluid nodes.
template <class F>
ScalarField sample(const Grid2D& g, F&& f) {
  ScalarField out(g.node_count());
  for (int k = 0; k < g.node_count(); ++k) out[k] = f(g.x(g.col(k)), g.y(g.row(k)));
  return out;
}

template <class F>
BeamField sample_beam(const Grid2D& g, F&& f) {
  BeamField out(g.beam_node_count());
  for (int i = 0; i <= g.nx(); ++i) out[i] = f(g.beam_x(i));
  return out;
}

// Mean over the fluid domain by trapezoid quadrature.
double mean(const Grid2D& g, const ScalarField& f);
double integrate(const Grid2D& g, const ScalarField& f);
double integrate_beam(const Grid2D& g, const BeamField& f);

}  // namespace fsilab

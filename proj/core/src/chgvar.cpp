#include "fsilab/chgvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fsilab/errors.hpp"

namespace fsilab {
namespace {

double blend(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double blend_slope(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }

double min_eigenvalue(const Matrix2& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return 0.5 * tr - disc;
}

}  // namespace

double CutoffProfile::value(double y) const {
  if (y <= lower || y >= upper) return 0.0;
  if (y < inner_low()) return blend((y - lower) / (inner_low() - lower));
  if (y > inner_high()) return blend((upper - y) / (upper - inner_high()));
  return 1.0;
}

double CutoffProfile::slope(double y) const {
  if (y <= lower || y >= upper) return 0.0;
  if (y < inner_low()) {
    const double w = inner_low() - lower;
    return blend_slope((y - lower) / w) / w;
  }
  if (y > inner_high()) {
    const double w = upper - inner_high();
    return -blend_slope((upper - y) / w) / w;
  }
  return 0.0;
}

CutoffProfile make_cutoff(const Grid2D& g, double lower, double upper, double epsilon) {
  if (!(lower < 0.0) || !(upper > 0.0) || !(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("cutoff: need lower < 0 < upper and 0 < epsilon < 1");
  if (lower <= -g.depth())
    throw ConfigError("cutoff: lower margin must stay above the bottom wall");
  CutoffProfile c;
  c.lower = lower;
  c.upper = upper;
  c.epsilon = epsilon;
  c.chi = sample(g, [&](double, double y) { return c.value(y); });
  return c;
}

CutoffProfile make_cutoff(const Grid2D& g) {
  return make_cutoff(g, -0.75 * g.depth(), 0.75 * g.depth(), 0.5);
}

Metrics metric_tensors(const MatrixField& gradX) {
  Metrics m;
  const auto n = static_cast<Eigen::Index>(gradX.size());
  m.B.resize(gradX.size());
  m.A.resize(gradX.size());
  m.delta.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Matrix2& F = gradX[k];
    const double a = F(0, 0), b = F(0, 1), c = F(1, 0), d = F(1, 1);
    const double det = a * d - b * c;
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "non-positive Jacobian " << det << " at node " << k;
      throw DiffeoFailure(os.str(), static_cast<int>(k), det);
    }
    m.delta[k] = det;
    m.B[k] << d, -c, -b, a;
    Matrix2 A = m.B[k].transpose() * m.B[k] / det;
    m.A[k] = 0.5 * (A + A.transpose());
  }
  return m;
}

DiffeoMap map_from_gradient(VectorField X, MatrixField gradX) {
  DiffeoMap map;
  Metrics m = metric_tensors(gradX);
  map.X = std::move(X);
  map.gradX = std::move(gradX);
  map.B = std::move(m.B);
  map.delta = std::move(m.delta);
  map.A = std::move(m.A);
  return map;
}

DiffeoMap identity_map(const Grid2D& g) {
  return map_from_gradient({g.xs(), g.ys()}, MatrixField(g.node_count(), Matrix2::Identity()));
}

DiffeoMap map_from_samples(const DiffOps& ops, const VectorField& X) {
  return map_from_gradient(X, gradient(ops, X));
}

DiffeoMap initial_diffeo(const Grid2D& g, const DiffOps& ops, const BeamField& eta1_0,
                         const CutoffProfile& chi, int n_flow_steps) {
  return initial_diffeo(g, eta1_0, ops.beam_dx * eta1_0, chi, n_flow_steps);
}

DiffeoMap initial_diffeo(const Grid2D& g, const BeamField& eta, const BeamField& slope,
                         const CutoffProfile& chi, int n_flow_steps) {
  if (eta.size() != g.beam_node_count() || slope.size() != g.beam_node_count())
    throw ConfigError("initial_diffeo: beam field size mismatch");
  if (n_flow_steps < 1) throw ConfigError("initial_diffeo: n_flow_steps must be positive");
  const double clamp_tol = 1e-12 * std::max(1.0, eta.cwiseAbs().maxCoeff());
  if (std::abs(eta[0]) > clamp_tol || std::abs(eta[eta.size() - 1]) > clamp_tol)
    throw GeometryError("initial_diffeo: eta1_0 must vanish at the beam endpoints");
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > chi.inner_low() && eta[i] < chi.inner_high())) {
      std::ostringstream os;
      os << "initial_diffeo: eta1_0 = " << eta[i] << " at beam node " << i
         << " leaves the admissible band (" << chi.inner_low() << ", " << chi.inner_high() << ")";
      throw GeometryError(os.str());
    }
  }

  const int n = g.node_count();
  VectorField X = VectorField::zeros(n);
  MatrixField F(n);
  const double dt = 1.0 / n_flow_steps;
  for (int k = 0; k < n; ++k) {
    const int i = g.col(k);
    const double e = eta[i], es = slope[i];
    // State (z, a, b): z = X_2, a = d_1 X_2, b = d_2 X_2.
    auto rhs = [&](const Eigen::Vector3d& s) {
      const double phi = chi.value(s[0]), dphi = chi.slope(s[0]);
      return Eigen::Vector3d(e * phi, es * phi + e * dphi * s[1], e * dphi * s[2]);
    };
    Eigen::Vector3d s(g.y(g.row(k)), 0.0, 1.0);
    if (e != 0.0 || es != 0.0) {
      for (int step = 0; step < n_flow_steps; ++step) {
        const Eigen::Vector3d k1 = rhs(s);
        const Eigen::Vector3d k2 = rhs(s + 0.5 * dt * k1);
        const Eigen::Vector3d k3 = rhs(s + 0.5 * dt * k2);
        const Eigen::Vector3d k4 = rhs(s + dt * k3);
        s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    X.x[k] = g.x(i);
    X.y[k] = s[0];
    F[k] << 1.0, 0.0, s[1], s[2];
  }
  return map_from_gradient(std::move(X), std::move(F));
}

DiffeoCertificate check_diffeo(const DiffeoMap& map, double c0) {
  DiffeoCertificate cert;
  cert.min_delta = std::numeric_limits<double>::infinity();
  cert.min_eig_A = std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < map.delta.size(); ++k) {
    const double d = map.delta[k];
    const double e = min_eigenvalue(map.A[k]);
    cert.min_delta = std::min(cert.min_delta, d);
    cert.min_eig_A = std::min(cert.min_eig_A, e);
    if (std::min(d, e) < worst) {
      worst = std::min(d, e);
      cert.worst_node = static_cast<int>(k);
    }
  }
  cert.pass = cert.min_delta >= c0 && cert.min_eig_A >= c0;
  return cert;
}

double default_c0(const DiffeoMap& X0) { return 0.5 * X0.delta.minCoeff(); }

namespace {

void require_above(const DiffeoMap& map, double c0) {
  Eigen::Index k;
  const double d = map.delta.minCoeff(&k);
  if (!(d > c0)) {
    std::ostringstream os;
    os << "Jacobian " << d << " at node " << k << " fell below c0 = " << c0;
    throw DiffeoFailure(os.str(), static_cast<int>(k), d);
  }
}

}  // namespace

DiffeoMap update_map(const DiffOps& ops, const DiffeoMap& X0,
                     const std::vector<VectorField>& v_history, double dt, double c0) {
  MapTracker tracker(ops, X0, c0);
  for (size_t n = 1; n < v_history.size(); ++n)
    tracker.advance(v_history[n - 1], v_history[n], dt);
  return tracker.current();
}

MapTracker::MapTracker(const DiffOps& ops, DiffeoMap X0, double c0)
    : ops_(&ops), map_(std::move(X0)), c0_(c0) {}

void MapTracker::advance(const VectorField& v_old, const VectorField& v_new, double dt) {
  const double w = 0.5 * dt;
  map_.X.x += w * (v_old.x + v_new.x);
  map_.X.y += w * (v_old.y + v_new.y);
  const MatrixField g_old = gradient(*ops_, v_old), g_new = gradient(*ops_, v_new);
  for (size_t k = 0; k < map_.gradX.size(); ++k) map_.gradX[k] += w * (g_old[k] + g_new[k]);
  Metrics m = metric_tensors(map_.gradX);
  map_.B = std::move(m.B);
  map_.delta = std::move(m.delta);
  map_.A = std::move(m.A);
  require_above(map_, c0_);
}

}  // namespace fsilab

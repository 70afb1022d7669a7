#include "fsilab/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "fsilab/errors.hpp"
#include "fsilab/linear.hpp"

namespace fsilab {

std::vector<std::string> scenario_ids() { return {"steady", "beam-pluck", "thermal-spot", "shear-start"}; }

FullState scenario_library(const Grid2D& g, const std::string& id, double a) {
  FullState s = FullState::zeros(g);
  const double L = g.length(), H = g.depth();
  if (id == "steady") return s;
  if (id == "beam-pluck") {
    s.eta1 = sample_beam(g, [&](double x) { return a * 16.0 * x * x * (L - x) * (L - x) / std::pow(L, 4); });
    s.eta1[0] = s.eta1[g.nx()] = 0.0;
    return s;
  }
  if (id == "thermal-spot") {
    const double w = 0.1;
    s.theta = sample(g, [&](double x, double y) {
      const double cx = std::cos(M_PI * x / L), cy = std::cos(M_PI * y / H);
      return a * std::exp(-(cx * cx + cy * cy) / w);
    });
    return s;
  }
  if (id == "shear-start") {
    // psi = c X(x)^2 Y(y)^2 with X = x (L - x), Y = y (y + H); v = (d_y psi, -d_x psi).
    const double c = 16.0 / (L * L * H * H);
    auto vx = [&](double x, double y) {
      const double X = x * (L - x), Y = y * (y + H);
      return c * X * X * 2.0 * Y * (2.0 * y + H) / (L * H);
    };
    auto vy = [&](double x, double y) {
      const double X = x * (L - x), Y = y * (y + H);
      return -c * 2.0 * X * (L - 2.0 * x) * Y * Y / (L * H);
    };
    s.v.x = sample(g, vx);
    s.v.y = sample(g, vy);
    const double m = std::max(s.v.x.cwiseAbs().maxCoeff(), s.v.y.cwiseAbs().maxCoeff());
    if (m > 0.0) {
      s.v.x *= a / m;
      s.v.y *= a / m;
    }
    for (int k = 0; k < g.node_count(); ++k)
      if (g.on_boundary(k)) s.v.x[k] = s.v.y[k] = 0.0;
    return s;
  }
  throw ConfigError("unknown scenario id '" + id + "'");
}

FullState to_full_values(const FullState& s, const PhysParams& p) {
  FullState f = s;
  f.rho.array() += p.rho_bar;
  f.theta.array() += p.theta_bar;
  return f;
}

}  // namespace fsilab

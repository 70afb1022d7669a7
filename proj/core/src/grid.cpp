#include "fsilab/grid.hpp"

#include <cmath>
#include <string>

#include "fsilab/errors.hpp"

namespace fsilab {

Grid2D::Grid2D(double L, double H, int nx, int ny) : L_(L), H_(H), nx_(nx), ny_(ny) {
  if (!(L > 0.0) || !(H > 0.0) || !std::isfinite(L) || !std::isfinite(H))
    throw ConfigError("grid: L and H must be positive and finite");
  if (nx < 4 || ny < 4)
    throw ConfigError("grid: nx and ny must be at least 4 (got " + std::to_string(nx) + ", " +
                      std::to_string(ny) + ")");
  hx_ = L / nx;
  hy_ = H / ny;

  const int n = node_count();
  interior_slot_.assign(n, -1);
  weights_.resize(n);
  for (int k = 0; k < n; ++k) {
    weights_[k] = weight(k);
    switch (classify(k)) {
      case NodeClass::interior:
        interior_slot_[k] = static_cast<int>(interior_.size());
        interior_.push_back(k);
        break;
      case NodeClass::gamma_s:
        gamma_s_.push_back(k);
        break;
      case NodeClass::gamma_0:
        gamma_0_.push_back(k);
        break;
    }
  }
  beam_weights_.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) beam_weights_[i] = wx(i);

  for (int i = 0; i <= nx; ++i) faces_.push_back({index(i, 0), 0.0, -1.0, wx(i)});
  for (int j = 0; j <= ny; ++j) faces_.push_back({index(nx, j), 1.0, 0.0, wy(j)});
  for (int i = nx; i >= 0; --i) faces_.push_back({index(i, ny), 0.0, 1.0, wx(i)});
  for (int j = ny; j >= 0; --j) faces_.push_back({index(0, j), -1.0, 0.0, wy(j)});
}

bool Grid2D::on_boundary(int k) const {
  const int i = col(k), j = row(k);
  return i == 0 || i == nx_ || j == 0 || j == ny_;
}

NodeClass Grid2D::classify(int k) const {
  const int i = col(k), j = row(k);
  if (!on_boundary(k)) return NodeClass::interior;
  if (j == ny_ && i > 0 && i < nx_) return NodeClass::gamma_s;
  return NodeClass::gamma_0;
}

ScalarField Grid2D::xs() const {
  return sample(*this, [](double x, double) { return x; });
}

ScalarField Grid2D::ys() const {
  return sample(*this, [](double, double y) { return y; });
}

BeamField Grid2D::top_trace(const ScalarField& f) const {
  BeamField out(nx_ + 1);
  for (int i = 0; i <= nx_; ++i) out[i] = f[index(i, ny_)];
  return out;
}

Grid2D build_grid(double L, double H, int nx, int ny) { return Grid2D(L, H, nx, ny); }

double integrate(const Grid2D& g, const ScalarField& f) { return g.weights().dot(f); }

double mean(const Grid2D& g, const ScalarField& f) { return integrate(g, f) / g.area(); }

double integrate_beam(const Grid2D& g, const BeamField& f) { return g.beam_weights().dot(f); }

}  // namespace fsilab

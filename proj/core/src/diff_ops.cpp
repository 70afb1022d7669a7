#include "fsilab/diff_ops.hpp"

#include <cmath>

namespace fsilab {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Stencil {
  int n = 0;
  int idx[3] = {0, 0, 0};
  double w[3] = {0, 0, 0};
};

// Second-order first-derivative stencil at position m of a 1D grid 0..M.
Stencil d1(int m, int M, double h) {
  Stencil s;
  s.n = 3;
  if (m == 0) {
    s.idx[0] = 0, s.idx[1] = 1, s.idx[2] = 2;
    s.w[0] = -1.5 / h, s.w[1] = 2.0 / h, s.w[2] = -0.5 / h;
  } else if (m == M) {
    s.idx[0] = M - 2, s.idx[1] = M - 1, s.idx[2] = M;
    s.w[0] = 0.5 / h, s.w[1] = -2.0 / h, s.w[2] = 1.5 / h;
  } else {
    s.n = 2;
    s.idx[0] = m - 1, s.idx[1] = m + 1;
    s.w[0] = -0.5 / h, s.w[1] = 0.5 / h;
  }
  return s;
}

Stencil d1_sbp(int m, int M, double h) {
  Stencil s;
  s.n = 2;
  if (m == 0) {
    s.idx[0] = 0, s.idx[1] = 1;
    s.w[0] = -1.0 / h, s.w[1] = 1.0 / h;
  } else if (m == M) {
    s.idx[0] = M - 1, s.idx[1] = M;
    s.w[0] = -1.0 / h, s.w[1] = 1.0 / h;
  } else {
    s.idx[0] = m - 1, s.idx[1] = m + 1;
    s.w[0] = -0.5 / h, s.w[1] = 0.5 / h;
  }
  return s;
}

SparseMatrix node_derivative(const Grid2D& g, int axis, Stencil (*rule)(int, int, double)) {
  Triplets t;
  for (int k = 0; k < g.node_count(); ++k) {
    const int i = g.col(k), j = g.row(k);
    if (axis == 0) {
      const Stencil s = rule(i, g.nx(), g.hx());
      for (int q = 0; q < s.n; ++q) t.emplace_back(k, g.index(s.idx[q], j), s.w[q]);
    } else {
      const Stencil s = rule(j, g.ny(), g.hy());
      for (int q = 0; q < s.n; ++q) t.emplace_back(k, g.index(i, s.idx[q]), s.w[q]);
    }
  }
  SparseMatrix m(g.node_count(), g.node_count());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

DiffOps diff_ops(const Grid2D& g) {
  DiffOps ops;
  ops.dx = node_derivative(g, 0, d1);
  ops.dy = node_derivative(g, 1, d1);
  ops.div_x = node_derivative(g, 0, d1_sbp);
  ops.div_y = node_derivative(g, 1, d1_sbp);

  std::vector<FluxTensor> id(g.node_count(), conormal_tensor(Matrix2::Identity()));
  SparseMatrix K = assemble_flux_divergence(g, 1, id);
  Eigen::VectorXd winv = g.weights().cwiseInverse();
  ops.laplacian = winv.asDiagonal() * K;

  const int nb = g.nx() + 1;
  const double h = g.hx();
  Triplets t;
  for (int i = 0; i < nb; ++i) {
    const Stencil s = d1(i, g.nx(), h);
    for (int q = 0; q < s.n; ++q) t.emplace_back(i, s.idx[q], s.w[q]);
  }
  ops.beam_dx = from_triplets(nb, nb, t);

  const int m = g.nx() - 1;
  t.clear();
  const double h2 = h * h, h4 = h2 * h2;
  for (int i = 0; i < m; ++i) {
    t.emplace_back(i, i, -2.0 / h2);
    if (i > 0) t.emplace_back(i, i - 1, 1.0 / h2);
    if (i < m - 1) t.emplace_back(i, i + 1, 1.0 / h2);
  }
  ops.beam_laplacian = from_triplets(m, m, t);

  // Ghost elimination: eta_{-1} = eta_1 gives 7 on the first and last diagonal.
  t.clear();
  for (int i = 0; i < m; ++i) {
    const bool edge = (i == 0 || i == m - 1);
    t.emplace_back(i, i, (edge ? 7.0 : 6.0) / h4);
    if (i > 0) t.emplace_back(i, i - 1, -4.0 / h4);
    if (i < m - 1) t.emplace_back(i, i + 1, -4.0 / h4);
    if (i > 1) t.emplace_back(i, i - 2, 1.0 / h4);
    if (i < m - 2) t.emplace_back(i, i + 2, 1.0 / h4);
  }
  ops.beam_bilaplacian = from_triplets(m, m, t);
  return ops;
}

MatrixField gradient(const DiffOps& ops, const VectorField& v) {
  const Eigen::VectorXd a = ops.dx * v.x, b = ops.dy * v.x;
  const Eigen::VectorXd c = ops.dx * v.y, d = ops.dy * v.y;
  MatrixField out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] << a[k], b[k], c[k], d[k];
  return out;
}

MatrixField symmetric_gradient(const DiffOps& ops, const VectorField& v) {
  MatrixField out = gradient(ops, v);
  for (auto& m : out) m = 0.5 * (m + m.transpose()).eval();
  return out;
}

VectorField gradient(const DiffOps& ops, const ScalarField& f) { return {ops.dx * f, ops.dy * f}; }

ScalarField divergence(const DiffOps& ops, const VectorField& v) {
  return ops.dx * v.x + ops.dy * v.y;
}

ScalarField divergence_sbp(const DiffOps& ops, const VectorField& v) {
  return ops.div_x * v.x + ops.div_y * v.y;
}

Eigen::VectorXd beam_interior(const BeamField& f) { return f.segment(1, f.size() - 2); }

BeamField beam_full(const Eigen::VectorXd& interior) {
  BeamField f = BeamField::Zero(interior.size() + 2);
  f.segment(1, interior.size()) = interior;
  return f;
}

BeamField apply_beam_laplacian(const DiffOps& ops, const BeamField& f) {
  return beam_full(ops.beam_laplacian * beam_interior(f));
}

BeamField apply_beam_bilaplacian(const DiffOps& ops, const BeamField& f) {
  return beam_full(ops.beam_bilaplacian * beam_interior(f));
}

Eigen::Vector2d outward_normal(const Grid2D& g, int node) {
  Eigen::Vector2d n = Eigen::Vector2d::Zero();
  const int i = g.col(node), j = g.row(node);
  if (i == 0) n.x() -= 1.0;
  if (i == g.nx()) n.x() += 1.0;
  if (j == 0) n.y() -= 1.0;
  if (j == g.ny()) n.y() += 1.0;
  const double len = n.norm();
  return len > 0 ? Eigen::Vector2d(n / len) : n;
}

FluxTensor conormal_tensor(const Matrix2& M) {
  FluxTensor C{};
  for (int j = 0; j < 2; ++j)
    for (int l = 0; l < 2; ++l) C[flux_index(0, j, 0, l)] = M(j, l);
  return C;
}

FluxTensor stress_tensor(const Matrix2& A, const Matrix2& B, double delta, double mu,
                         double alpha) {
  FluxTensor C{};
  const double s = (mu + alpha) / delta;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          C[flux_index(i, j, k, l)] = (i == k ? mu * A(l, j) : 0.0) + s * B(i, l) * B(k, j);
  return C;
}

namespace {

// Visit every interior face. For a face between nodes a (low) and b (high)
// along `axis`, fn(a, b, axis, length) is called.
template <class Fn>
void for_each_face(const Grid2D& g, Fn&& fn) {
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) fn(g.index(i, j), g.index(i + 1, j), 0, g.wy(j));
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) fn(g.index(i, j), g.index(i, j + 1), 1, g.wx(i));
}

}  // namespace

SparseMatrix assemble_flux_divergence(const Grid2D& g, int ncomp,
                                      const std::vector<FluxTensor>& C) {
  const int n = g.node_count();
  Triplets t;
  t.reserve(static_cast<size_t>(n) * ncomp * ncomp * 20);
  for_each_face(g, [&](int a, int b, int axis, double len) {
    const int other = 1 - axis;
    const double h = axis == 0 ? g.hx() : g.hy();
    // Tangential derivative stencils at a and b.
    Stencil sa, sb;
    if (other == 0) {
      sa = d1(g.col(a), g.nx(), g.hx());
      sb = d1(g.col(b), g.nx(), g.hx());
    } else {
      sa = d1(g.row(a), g.ny(), g.hy());
      sb = d1(g.row(b), g.ny(), g.hy());
    }
    auto node_of = [&](int base, int pos) {
      return other == 0 ? g.index(pos, g.row(base)) : g.index(g.col(base), pos);
    };
    for (int c = 0; c < ncomp; ++c) {
      for (int k = 0; k < ncomp; ++k) {
        const double cn =
            0.5 * (C[a][flux_index(c, axis, k, axis)] + C[b][flux_index(c, axis, k, axis)]);
        const double ct =
            0.5 * (C[a][flux_index(c, axis, k, other)] + C[b][flux_index(c, axis, k, other)]);
        const int ra = c * n + a, rb = c * n + b;
        if (cn != 0.0) {
          const double w = len * cn / h;
          t.emplace_back(ra, k * n + b, w);
          t.emplace_back(ra, k * n + a, -w);
          t.emplace_back(rb, k * n + b, -w);
          t.emplace_back(rb, k * n + a, w);
        }
        if (ct != 0.0) {
          const double w = 0.5 * len * ct;
          for (int q = 0; q < sa.n; ++q) {
            const int col = k * n + node_of(a, sa.idx[q]);
            t.emplace_back(ra, col, w * sa.w[q]);
            t.emplace_back(rb, col, -w * sa.w[q]);
          }
          for (int q = 0; q < sb.n; ++q) {
            const int col = k * n + node_of(b, sb.idx[q]);
            t.emplace_back(ra, col, w * sb.w[q]);
            t.emplace_back(rb, col, -w * sb.w[q]);
          }
        }
      }
    }
  });
  return from_triplets(ncomp * n, ncomp * n, t);
}

Eigen::VectorXd apply_flux_divergence(const Grid2D& g, const DiffOps& ops, int ncomp,
                                      const std::vector<FluxTensor>& C, const Eigen::VectorXd& u) {
  const int n = g.node_count();
  std::vector<Eigen::VectorXd> grad[2];
  for (int k = 0; k < ncomp; ++k) {
    grad[0].push_back(ops.dx * u.segment(k * n, n));
    grad[1].push_back(ops.dy * u.segment(k * n, n));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ncomp * n);
  for_each_face(g, [&](int a, int b, int axis, double len) {
    const int other = 1 - axis;
    const double h = axis == 0 ? g.hx() : g.hy();
    for (int c = 0; c < ncomp; ++c) {
      double flux = 0.0;
      for (int k = 0; k < ncomp; ++k) {
        const double dn = (u[k * n + b] - u[k * n + a]) / h;
        const double dt = 0.5 * (grad[other][k][a] + grad[other][k][b]);
        flux += 0.5 * (C[a][flux_index(c, axis, k, axis)] + C[b][flux_index(c, axis, k, axis)]) * dn;
        flux += 0.5 * (C[a][flux_index(c, axis, k, other)] + C[b][flux_index(c, axis, k, other)]) * dt;
      }
      out[c * n + a] += len * flux;
      out[c * n + b] -= len * flux;
    }
  });
  return out;
}

BoundaryField conormal_flux(const Grid2D& g, const DiffOps& ops, const MatrixField& M,
                            const ScalarField& theta) {
  const Eigen::VectorXd tx = ops.dx * theta, ty = ops.dy * theta;
  const auto& faces = g.boundary_faces();
  BoundaryField out(static_cast<Eigen::Index>(faces.size()));
  for (size_t f = 0; f < faces.size(); ++f) {
    const int k = faces[f].node;
    const Eigen::Vector2d q = M[k] * Eigen::Vector2d(tx[k], ty[k]);
    out[static_cast<Eigen::Index>(f)] = faces[f].nx * q.x() + faces[f].ny * q.y();
  }
  return out;
}

Eigen::VectorXd boundary_load(const Grid2D& g, const BoundaryField& values) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.node_count());
  const auto& faces = g.boundary_faces();
  for (size_t f = 0; f < faces.size(); ++f)
    out[faces[f].node] += faces[f].length * values[static_cast<Eigen::Index>(f)];
  return out;
}

}  // namespace fsilab

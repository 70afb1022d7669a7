#pragma once

#include <algorithm>
#include <random>

#include "fsilab/fixed_point.hpp"
#include "fsilab/scenario.hpp"

namespace fsilab::testing {

// Beam pluck, thermal spot and shear start superposed, amplitude a each.
inline FullState mixed_perturbation(const Grid2D& g, double a) {
  FullState s = scenario_library(g, "beam-pluck", a);
  s.theta = scenario_library(g, "thermal-spot", a).theta;
  s.v = scenario_library(g, "shear-start", a).v;
  return s;
}

// Mixed perturbation rescaled so that data_norm equals `target`.
inline FullState mixed_with_norm(const Grid2D& g, const DiffOps& ops, const PhysParams& p, Mode mode,
                                 double target) {
  const FullState unit = mixed_perturbation(g, 1.0);
  const FullState probe = mode == Mode::local ? to_full_values(unit, p) : unit;
  const double n1 = data_norm(g, ops, probe, mode, 4.0);
  const FullState s = mixed_perturbation(g, target / n1);
  return mode == Mode::local ? to_full_values(s, p) : s;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(gen);
  return v;
}

inline double max_abs(const FullState& s) {
  return std::max({s.rho.cwiseAbs().maxCoeff(), s.v.x.cwiseAbs().maxCoeff(), s.v.y.cwiseAbs().maxCoeff(),
                   s.theta.cwiseAbs().maxCoeff(), s.eta1.cwiseAbs().maxCoeff(), s.eta2.cwiseAbs().maxCoeff()});
}

}  // namespace fsilab::testing

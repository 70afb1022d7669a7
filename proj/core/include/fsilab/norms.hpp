#pragma once

#include <limits>
#include <vector>

#include "fsilab/diff_ops.hpp"
#include "fsilab/grid.hpp"

namespace fsilab {

// Exponents and weights for discrete Sobolev and weighted-in-time norms.
// p = infinity selects the max over time samples.
struct NormSpec {
  int k = 0;
  double q = 2.0;
  double p = 2.0;
  double beta = 0.0;

  static constexpr double infinity = std::numeric_limits<double>::infinity();
};

void validate(const NormSpec& spec);

// (sum over |alpha| <= k of the trapezoid integral of |d^alpha f|^q)^(1/q).
double discrete_norm(const Grid2D& g, const DiffOps& ops, const ScalarField& f,
                     const NormSpec& spec);
double discrete_norm(const Grid2D& g, const DiffOps& ops, const VectorField& f,
                     const NormSpec& spec);
double discrete_beam_norm(const Grid2D& g, const DiffOps& ops, const BeamField& f,
                          const NormSpec& spec);

// (sum_n |e^{beta t_n} s_n|^p dt)^(1/p) with t_n = n dt.
double weighted_time_norm(const std::vector<double>& series, double dt, const NormSpec& spec);

}  // namespace fsilab

#include "fsilab/norms.hpp"

#include <cmath>

#include "fsilab/errors.hpp"

namespace fsilab {

void validate(const NormSpec& spec) {
  if (spec.k < 0 || spec.k > 2) throw ConfigError("norm: spatial order k must be 0, 1 or 2");
  if (!(spec.q > 1.0) || !std::isfinite(spec.q)) throw ConfigError("norm: q must lie in (1, inf)");
  if (!(spec.p > 1.0)) throw ConfigError("norm: p must lie in (1, inf]");
  if (!(spec.beta >= 0.0)) throw ConfigError("norm: beta must be non-negative");
}

namespace {

double power_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& f, double q) {
  return w.dot(f.cwiseAbs().array().pow(q).matrix());
}

double scalar_power_sum(const Grid2D& g, const DiffOps& ops, const ScalarField& f,
                        const NormSpec& spec) {
  const auto& w = g.weights();
  double s = power_sum(w, f, spec.q);
  if (spec.k >= 1) {
    const Eigen::VectorXd fx = ops.dx * f, fy = ops.dy * f;
    s += power_sum(w, fx, spec.q) + power_sum(w, fy, spec.q);
    if (spec.k >= 2) {
      s += power_sum(w, ops.dx * fx, spec.q);
      s += power_sum(w, ops.dy * fx, spec.q);
      s += power_sum(w, ops.dy * fy, spec.q);
    }
  }
  return s;
}

}  // namespace

double discrete_norm(const Grid2D& g, const DiffOps& ops, const ScalarField& f,
                     const NormSpec& spec) {
  validate(spec);
  return std::pow(scalar_power_sum(g, ops, f, spec), 1.0 / spec.q);
}

double discrete_norm(const Grid2D& g, const DiffOps& ops, const VectorField& f,
                     const NormSpec& spec) {
  validate(spec);
  return std::pow(scalar_power_sum(g, ops, f.x, spec) + scalar_power_sum(g, ops, f.y, spec),
                  1.0 / spec.q);
}

double discrete_beam_norm(const Grid2D& g, const DiffOps& ops, const BeamField& f,
                          const NormSpec& spec) {
  validate(spec);
  const auto& w = g.beam_weights();
  double s = power_sum(w, f, spec.q);
  Eigen::VectorXd d = f;
  for (int order = 1; order <= spec.k; ++order) {
    d = ops.beam_dx * d;
    s += power_sum(w, d, spec.q);
  }
  return std::pow(s, 1.0 / spec.q);
}

double weighted_time_norm(const std::vector<double>& series, double dt, const NormSpec& spec) {
  if (series.empty()) throw ConfigError("weighted_time_norm: empty series");
  if (!(dt > 0.0)) throw ConfigError("weighted_time_norm: dt must be positive");
  if (!(spec.beta >= 0.0)) throw ConfigError("weighted_time_norm: beta must be non-negative");
  const bool sup = std::isinf(spec.p);
  double acc = 0.0;
  for (size_t n = 0; n < series.size(); ++n) {
    const double v = std::abs(std::exp(spec.beta * dt * static_cast<double>(n)) * series[n]);
    acc = sup ? std::max(acc, v) : acc + std::pow(v, spec.p) * dt;
  }
  return sup ? acc : std::pow(acc, 1.0 / spec.p);
}

}  // namespace fsilab

#pragma once

#include <stdexcept>
#include <string>

namespace fsilab {

// Invalid configuration or parameter set.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Initial geometry violates the admissible box around the beam.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Jacobian of a map fell below the admissible bound at some node.
class DiffeoFailure : public std::runtime_error {
 public:
  DiffeoFailure(const std::string& what, int node, double delta)
      : std::runtime_error(what), node_(node), delta_(delta) {}
  int node() const { return node_; }
  double delta() const { return delta_; }

 private:
  int node_;
  double delta_;
};

// Linear solve or factorization failure.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double residual = -1.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Eigensolver failure, non-finite values and similar.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fsilab

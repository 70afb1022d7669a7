#pragma once

#include <string>
#include <vector>

#include "fsilab/chgvar.hpp"
#include "fsilab/diff_ops.hpp"
#include "fsilab/grid.hpp"
#include "fsilab/params.hpp"

namespace fsilab {

// (rho, v, theta, eta1, eta2) at one instant. In local mode rho and theta are
// full values; in global mode they are perturbations of (rho_bar, theta_bar).
struct FullState {
  ScalarField rho;
  VectorField v;
  ScalarField theta;
  BeamField eta1;
  BeamField eta2;
  double t = 0.0;

  static FullState zeros(const Grid2D& g);
};

// One time sample of (F1, F2, F3, G, H). In global mode h = h_tilde + h_hat.
struct SourceSample {
  ScalarField f1;
  VectorField f2;
  ScalarField f3;
  BoundaryField g;
  BeamField h;
  BeamField h_tilde;
  BeamField h_hat;
};

struct MeanFluctSplit {
  ScalarField tilde;
  double avg = 0.0;
};

MeanFluctSplit split_mean(const Grid2D& g, const ScalarField& f);

// Time derivatives entering F2 and F3, supplied by the caller.
struct Rates {
  VectorField dv;
  ScalarField dtheta;
};

SourceSample eval_local_sources(const Grid2D& g, const DiffOps& ops, const FullState& s,
                                const DiffeoMap& map, const Metrics& m0, const ScalarField& rho0,
                                const PhysParams& p, const Rates& rates);

// Factor on |grad v B^T + B grad v^T|^2 in the global temperature source.
enum class ShearHeating { as_printed, consistent };

struct GlobalSourceOptions {
  ShearHeating shear = ShearHeating::as_printed;
};

// rho_split and theta_split give the tilde/hat decomposition used for the
// H = H_tilde + H_hat split.
SourceSample eval_global_sources(const Grid2D& g, const DiffOps& ops, const FullState& s,
                                 const DiffeoMap& map, const PhysParams& p,
                                 const MeanFluctSplit& rho_split,
                                 const MeanFluctSplit& theta_split, const Rates& rates,
                                 const GlobalSourceOptions& opt = {});

enum class Mode { local, global };

struct CompatibilityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool applies = true;
  bool pass = true;
};

struct CompatibilityReport {
  std::vector<CompatibilityCheck> checks;
  bool pass() const;
};

// Initial-data compatibility. Conditions are gated on the (p, q) regime:
// traces when 1/p + 1/(2q) < 1, Neumann and slope conditions when < 1/2.
CompatibilityReport check_compatibility(const Grid2D& g, const DiffOps& ops,
                                        const FullState& initial, const DiffeoMap& X0,
                                        const PhysParams& p, Mode mode, double p_exp = 4.0,
                                        double q_exp = 4.0, double tol = 1e-10);

}  // namespace fsilab

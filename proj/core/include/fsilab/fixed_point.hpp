#pragma once

#include <string>
#include <vector>

#include "fsilab/chgvar.hpp"
#include "fsilab/linear.hpp"
#include "fsilab/norms.hpp"
#include "fsilab/sources.hpp"

namespace fsilab {

struct IterationConfig {
  double T = 0.1;        // horizon (T_max in global mode)
  double dt = 1e-3;
  double R = 0.0;        // ball radius; <= 0 selects min(10 |initial|, 1), 1 for zero data
  int max_iters = 40;
  double tol = 1e-10;    // relative successive-difference tolerance
  double abs_tol = 1e-13;  // absolute floor: differences below it are round-off
  double beta = 0.0;     // decay weight, global mode only
  double p = 4.0;
  double q = 4.0;
  double gamma1 = 1.0;   // shift of the mean-temperature split (global mode)
  TimeScheme scheme = TimeScheme::backward_euler;
  ShearHeating shear = ShearHeating::as_printed;
  bool nonlinear = true;  // false: sources forced to zero
  int flow_steps = 64;    // RK4 steps for the initial diffeomorphism
  double c0 = 0.0;        // Jacobian floor; <= 0 selects half the initial minimum
  // Cutoff margins of the initial diffeomorphism, as fractions of the depth.
  double cutoff_lower = -0.75;
  double cutoff_upper = 0.75;
  double cutoff_epsilon = 0.5;
  int steps() const;
};
// T, dt, tol > 0, dt divides T, 2 < p, 3 < q, and the non-resonance flag.
std::vector<std::string> violations(const IterationConfig& cfg, Mode mode);
void validate(const IterationConfig& cfg, Mode mode);

enum class IterationStatus { converged, ball_exit, diffeo_failure, max_iters };
std::string to_string(IterationStatus s);

struct IterationReport {
  std::vector<double> bundle_norms;  // |S_{k+1}|
  std::vector<double> diff_norms;    // |S_{k+1} - S_k|
  std::vector<double> ratios;        // diff_k / diff_{k-1}
  IterationStatus status = IterationStatus::max_iters;
  int iterations = 0;
  double R = 0.0;
  double initial_norm = 0.0;
  double T = 0.0;
  std::string message;
  // Global mode.
  double decay_rate = 0.0;
  double decay_r2 = 0.0;
  bool decay_violation = false;
  double weighted_state_norm = 0.0;
};

// States on t_n = n dt together with the Jacobian of the Lagrangian map.
struct Trajectory {
  Mode mode = Mode::local;
  double dt = 0.0;
  double rho_bar = 1.0;
  std::vector<FullState> states;
  std::vector<ScalarField> delta;
  std::vector<double> theta_flat;  // global mode: mean-temperature primitive
};

struct RunResult {
  Trajectory trajectory;
  IterationReport report;
  SourceBundle bundle;  // last bundle used to march
};

// Size of the initial data: W^{1,q} norms of (rho, v, theta) (deviations from
// their means in local mode), W^{2,q} of eta1 and W^{1,q} of eta2.
double data_norm(const Grid2D& g, const DiffOps& ops, const FullState& s, Mode mode, double q);

// Componentwise proxy of the source space: f1 in L^p(W^{1,q}), f2, f3, h in
// L^p(L^q), g in L^p of the boundary L^q norm; all with weight e^{beta t}.
double bundle_norm(const Grid2D& g, const DiffOps& ops, const SourceBundle& b, const NormSpec& spec);
SourceBundle bundle_difference(const SourceBundle& a, const SourceBundle& b);

// Local-in-time iteration. `initial` carries full values of rho and theta.
// A non-empty `guess` replaces the zero initial bundle.
RunResult run_local(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                    const FullState& initial, const IterationConfig& cfg,
                    const SourceBundle* guess = nullptr);

struct BisectionResult {
  RunResult result;
  std::vector<double> horizons;
  std::vector<IterationStatus> statuses;
  double existence_time = 0.0;  // largest T that converged
};
// Halve T until run_local converges (at most max_halvings times).
BisectionResult run_local_bisect(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                                 const FullState& initial, IterationConfig cfg, int max_halvings);

// Global small-data iteration around (rho_bar, 0, theta_bar, 0, 0); `initial`
// carries perturbations. The linear part is the coupled operator A_FS
// marched by backward Euler.
RunResult run_global(const Grid2D& g, const DiffOps& ops, const PhysParams& p,
                     const FullState& initial, const IterationConfig& cfg);

// |(rho - mean, v, theta - mean, eta2)| in L^2: the part of the state that
// must decay (the constants and a static plate deflection do not).
double dynamic_norm(const Grid2D& g, const FullState& s);

struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
};
// Least squares fit of log y = a - rate t on samples with t >= t_from.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t_from);

struct ConservedSeries {
  std::vector<double> t;
  std::vector<double> mass;    // local: int rho delta; global: int rho + rho_bar int eta1
  std::vector<double> energy;  // kinetic + thermal + plate proxy
  double max_drift = 0.0;      // max |mass - mass_0|
  double drift_rate = 0.0;     // max_drift / horizon
};
ConservedSeries conserved_quantities(const Grid2D& g, const DiffOps& ops, const Trajectory& tr,
                                     const PhysParams& p);

}  // namespace fsilab

#pragma once

#include <string>
#include <vector>

namespace fsilab {

// Physical constants of the fluid-plate system (nondimensional).
struct PhysParams {
  double mu = 1.0;
  double alpha = 0.0;
  double kappa = 1.0;
  double cv = 1.0;
  double R0 = 1.0;
  double pi0 = -1.0;
  double rho_bar = 1.0;
  double theta_bar = 1.0;

  double kappa_bar() const { return kappa / (cv * rho_bar); }
};

// All constraint violations; global mode also requires pi0 = -R0 rho_bar theta_bar.
std::vector<std::string> violations(const PhysParams& p, bool global_mode);
// Throws ConfigError listing every violation.
void validate(const PhysParams& p, bool global_mode);

}  // namespace fsilab

#pragma once

#include <string>
#include <vector>

#include "fsilab/params.hpp"
#include "fsilab/sources.hpp"

namespace fsilab {

// Initial perturbations by id:
//   steady       all zero
//   beam-pluck   eta1 = a 16 x^2 (L - x)^2 / L^4
//   thermal-spot theta = a exp(-(cos^2(pi x / L) + cos^2(pi y / H)) / w), flat
//                normal derivative on every wall
//   shear-start  v = a curl psi with psi vanishing to second order on the walls
// Every field is compatible with clamped, no-slip and Neumann data.
std::vector<std::string> scenario_ids();
FullState scenario_library(const Grid2D& g, const std::string& id, double amplitude);

// Adds rho_bar and theta_bar to a perturbation (local mode works with full values).
FullState to_full_values(const FullState& perturbation, const PhysParams& p);

}  // namespace fsilab

#include "fsilab/params.hpp"

#include <cmath>
#include <sstream>

#include "fsilab/errors.hpp"

namespace fsilab {

std::vector<std::string> violations(const PhysParams& p, bool global_mode) {
  std::vector<std::string> out;
  auto fmt = [](const char* what, double v) {
    std::ostringstream os;
    os << what << " (got " << v << ")";
    return os.str();
  };
  const double vals[] = {p.mu, p.alpha, p.kappa, p.cv, p.R0, p.pi0, p.rho_bar, p.theta_bar};
  for (double v : vals)
    if (!std::isfinite(v)) {
      out.push_back("parameters must be finite");
      return out;
    }
  if (!(p.R0 > 0)) out.push_back(fmt("R0 must be positive", p.R0));
  if (!(p.mu > 0)) out.push_back(fmt("mu must be positive", p.mu));
  if (!(p.alpha + 2.0 * p.mu / 3.0 > 0))
    out.push_back(fmt("viscosity relation alpha + 2 mu / 3 > 0 violated", p.alpha + 2.0 * p.mu / 3.0));
  if (!(p.kappa > 0)) out.push_back(fmt("kappa must be positive", p.kappa));
  if (!(p.cv > 0)) out.push_back(fmt("cv must be positive", p.cv));
  if (!(p.rho_bar > 0)) out.push_back(fmt("rho_bar must be positive", p.rho_bar));
  if (!(p.theta_bar > 0)) out.push_back(fmt("theta_bar must be positive", p.theta_bar));
  if (global_mode) {
    const double target = -p.R0 * p.rho_bar * p.theta_bar;
    if (std::abs(p.pi0 - target) > 1e-12 * std::max(1.0, std::abs(target)))
      out.push_back(fmt("global mode requires pi0 = -R0 rho_bar theta_bar", p.pi0));
  }
  return out;
}

void validate(const PhysParams& p, bool global_mode) {
  const auto v = violations(p, global_mode);
  if (v.empty()) return;
  std::string msg = "invalid physical parameters:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConfigError(msg);
}

}  // namespace fsilab

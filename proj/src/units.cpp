#include "rotortrack/units.hpp"

#include <cmath>

#include "rotortrack/errors.hpp"

namespace rotortrack {

UnitSystem::UnitSystem(double b_invcm, double mu_debye) : b_invcm_(b_invcm), mu_debye_(mu_debye) {
  if (!(b_invcm > 0.0) || !std::isfinite(b_invcm)) throw InvalidArgument("B_invcm must be positive");
  if (!(mu_debye > 0.0) || !std::isfinite(mu_debye)) throw InvalidArgument("mu_debye must be positive");
}

double UnitSystem::time_unit_ps() const {
  return 1.0 / (2.0 * constants::kPi * constants::kSpeedOfLightCmPerPs * b_invcm_);
}

double UnitSystem::energy_unit_j() const {
  return constants::kPlanck * constants::kSpeedOfLightCmPerS * b_invcm_;
}

double UnitSystem::field_unit_v_per_m() const {
  return energy_unit_j() / (mu_debye_ * constants::kDebye);
}

UnitSystem ocs_units() { return UnitSystem(0.203, 0.709); }

}  // namespace rotortrack

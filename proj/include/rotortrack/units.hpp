#pragma once

namespace rotortrack {

/// CODATA 2018 constants used for conversions at the I/O boundary.
namespace constants {
inline constexpr double kSpeedOfLightCmPerPs = 2.99792458e-2;
inline constexpr double kSpeedOfLightCmPerS = 2.99792458e10;
inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr double kReducedPlanck = 1.054571817e-34;  // J s
inline constexpr double kDebye = 3.33564095198152e-30;     // C m (1e-21 / c)
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

/// Physical parameters of a planar rotor. Internally everything runs in
/// reduced units hbar = B = mu = 1: energies in B, times in hbar/B and
/// fields in B/mu.
class UnitSystem {
 public:
  UnitSystem(double b_invcm, double mu_debye);

  double b_invcm() const { return b_invcm_; }
  double mu_debye() const { return mu_debye_; }

  /// hbar/B in picoseconds, i.e. 1 / (2 pi c B[cm^-1]).
  double time_unit_ps() const;
  /// B/mu in V/m.
  double field_unit_v_per_m() const;
  /// B in joules.
  double energy_unit_j() const;

  double to_ps(double t_reduced) const { return t_reduced * time_unit_ps(); }
  double from_ps(double t_ps) const { return t_ps / time_unit_ps(); }
  double to_v_per_m(double field_reduced) const { return field_reduced * field_unit_v_per_m(); }

 private:
  double b_invcm_;
  double mu_debye_;
};

/// Carbonyl sulfide: mu = 0.709 D, B = 0.203 cm^-1.
UnitSystem ocs_units();

}  // namespace rotortrack

#pragma once

#include "rotortrack/rotor.hpp"

namespace rotortrack {

/// Second moments and orientation of a state:
/// cc = <cos^2>, ss = <sin^2>, sc = Re<cos sin>, cx = <cos>, sy = <sin>.
struct OrientationMoments {
  double cc = 0.0;
  double ss = 0.0;
  double sc = 0.0;
  double cx = 0.0;
  double sy = 0.0;
};

/// Control-field pair at time t, reduced units (B/mu).
struct FieldSample {
  double t = 0.0;
  double eps_x = 0.0;
  double eps_y = 0.0;
};

struct GuardConfig {
  double d_min = 1e-8;
  double margin_min = 1e-6;

  /// Throws InvalidArgument unless both floors are positive and finite.
  void validate() const;
};

/// Computed from the cached cos/sin matrices: cc = |C psi|^2, ss = |S psi|^2 and
/// sc = Re<C psi|S psi>, so cc*ss - sc^2 >= 0 holds exactly in the truncated basis.
OrientationMoments orientation_moments(const RotorState& state, const RotorOperators& ops);
OrientationMoments orientation_moments(const RotorState& state);
/// Raw-coefficient variant for propagation loops; psi must match ops.basis.
OrientationMoments orientation_moments(const ComplexVector& psi, const RotorOperators& ops);

/// D = cc*ss - sc^2, unclamped.
double determinant(const OrientationMoments& moments);

/// 1 - (cx^2 + sy^2). Positive margin certifies D > 0.
double boundary_margin(const OrientationMoments& moments);

/// Field-free parts of the orientation accelerations, <A_x> and <A_y>.
struct AccelerationTerms {
  double ax = 0.0;
  double ay = 0.0;
};

AccelerationTerms field_free_acceleration(const RotorState& state, const RotorOperators& ops);
AccelerationTerms field_free_acceleration(const ComplexVector& psi, const RotorOperators& ops);

/// Solves
///   2 [[ss, -sc], [-sc, cc]] (eps_x, eps_y)^T = (d2x + <A_x>, d2y + <A_y>)^T
/// for the fields that give the requested second derivatives of <cos> and <sin>.
/// Throws SingularityGuard when D < d_min or margin < margin_min, NonFinite on
/// non-finite inputs. `t` is only used to label errors and the result.
FieldSample solve_fields_from_moments(const OrientationMoments& moments, const AccelerationTerms& free_accel,
                                      double d2x, double d2y, const GuardConfig& guard, double t = 0.0);

FieldSample solve_fields(const RotorState& state, const RotorOperators& ops, double d2x, double d2y,
                         const GuardConfig& guard, double t = 0.0);
FieldSample solve_fields(const RotorState& state, double d2x, double d2y, const GuardConfig& guard,
                         double t = 0.0);

}  // namespace rotortrack

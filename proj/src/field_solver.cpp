#include "rotortrack/field_solver.hpp"

#include <cmath>

#include "rotortrack/errors.hpp"

namespace rotortrack {

void GuardConfig::validate() const {
  if (!(d_min > 0.0) || !std::isfinite(d_min)) throw InvalidArgument("guard d_min must be positive");
  if (!(margin_min > 0.0) || !std::isfinite(margin_min)) {
    throw InvalidArgument("guard margin_min must be positive");
  }
}

OrientationMoments orientation_moments(const RotorState& state, const RotorOperators& ops) {
  if (!(state.basis() == ops.basis)) throw BasisMismatch("state and operator set use different bases");
  return orientation_moments(state.coeffs(), ops);
}

OrientationMoments orientation_moments(const ComplexVector& psi, const RotorOperators& ops) {
  const ComplexVector c_psi = ops.cos.matrix() * psi;
  const ComplexVector s_psi = ops.sin.matrix() * psi;
  OrientationMoments m;
  m.cc = c_psi.squaredNorm();
  m.ss = s_psi.squaredNorm();
  m.sc = c_psi.dot(s_psi).real();
  m.cx = psi.dot(c_psi).real();
  m.sy = psi.dot(s_psi).real();
  return m;
}

OrientationMoments orientation_moments(const RotorState& state) {
  return orientation_moments(state, *operators_for(state.basis()));
}

double determinant(const OrientationMoments& m) { return m.cc * m.ss - m.sc * m.sc; }

double boundary_margin(const OrientationMoments& m) { return 1.0 - (m.cx * m.cx + m.sy * m.sy); }

AccelerationTerms field_free_acceleration(const RotorState& state, const RotorOperators& ops) {
  return {expectation_real(state, ops.accel_x), expectation_real(state, ops.accel_y)};
}

AccelerationTerms field_free_acceleration(const ComplexVector& psi, const RotorOperators& ops) {
  return {psi.dot(ops.accel_x.matrix() * psi).real(), psi.dot(ops.accel_y.matrix() * psi).real()};
}

FieldSample solve_fields_from_moments(const OrientationMoments& m, const AccelerationTerms& free_accel, double d2x,
                                      double d2y, const GuardConfig& guard, double t) {
  if (!std::isfinite(d2x) || !std::isfinite(d2y)) throw NonFinite("designated accelerations");
  if (!std::isfinite(m.cc) || !std::isfinite(m.ss) || !std::isfinite(m.sc) || !std::isfinite(m.cx) ||
      !std::isfinite(m.sy) || !std::isfinite(free_accel.ax) || !std::isfinite(free_accel.ay)) {
    throw NonFinite("state moments");
  }

  const double det = determinant(m);
  const double margin = boundary_margin(m);
  const bool det_low = det < guard.d_min;
  const bool margin_low = margin < guard.margin_min;
  if (det_low || margin_low) {
    const auto reason = det_low && margin_low ? SingularityGuard::Reason::kBoth
                        : det_low             ? SingularityGuard::Reason::kDeterminant
                                              : SingularityGuard::Reason::kMargin;
    throw SingularityGuard(reason, t, det, margin);
  }

  const double rx = d2x + free_accel.ax;
  const double ry = d2y + free_accel.ay;
  // inverse of 2 [[ss, -sc], [-sc, cc]] is [[cc, sc], [sc, ss]] / (2 D)
  FieldSample out;
  out.t = t;
  out.eps_x = (m.cc * rx + m.sc * ry) / (2.0 * det);
  out.eps_y = (m.sc * rx + m.ss * ry) / (2.0 * det);
  if (!std::isfinite(out.eps_x) || !std::isfinite(out.eps_y)) throw NonFinite("solved fields overflowed");
  return out;
}

FieldSample solve_fields(const RotorState& state, const RotorOperators& ops, double d2x, double d2y,
                         const GuardConfig& guard, double t) {
  return solve_fields_from_moments(orientation_moments(state, ops), field_free_acceleration(state, ops), d2x, d2y,
                                   guard, t);
}

FieldSample solve_fields(const RotorState& state, double d2x, double d2y, const GuardConfig& guard, double t) {
  return solve_fields(state, *operators_for(state.basis()), d2x, d2y, guard, t);
}

}  // namespace rotortrack

#pragma once

#include "rotortrack/rotor.hpp"

namespace rotortrack {

/// Single-field tracking for H = H0 - mu*eps(t) and an observable O whose first
/// time derivative already contains the field ([mu, O] != 0). Reduced units, hbar = 1:
///
///   eps = (i dO_d/dt + <[H0, O]>) / <[mu, O]>
///
/// All matrices must be Hermitian and share the dimension of `psi` (normalized).
/// Throws CommutingObservable when max|[mu, O]| < tol and TrackingSingularity when
/// |<[mu, O]>| < tol for a non-vanishing commutator.
double generic_field_k0(const ComplexMatrix& h0, const ComplexMatrix& mu, const ComplexMatrix& observable,
                        const ComplexVector& psi, double d_observable_dt, double tol);

/// Same, with tol = 1e-10 * dim.
double generic_field_k0(const ComplexMatrix& h0, const ComplexMatrix& mu, const ComplexMatrix& observable,
                        const ComplexVector& psi, double d_observable_dt);

}  // namespace rotortrack

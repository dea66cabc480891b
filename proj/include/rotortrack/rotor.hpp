#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rotortrack {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Truncated angular-momentum basis |m>, m = -M..M. Index i holds m = i - M.
class BasisSpec {
 public:
  explicit BasisSpec(int cutoff);

  int cutoff() const { return cutoff_; }
  int dim() const { return 2 * cutoff_ + 1; }
  int m_at(int index) const { return index - cutoff_; }
  int index_of(int m) const { return m + cutoff_; }
  std::vector<int> m_values() const;

  bool operator==(const BasisSpec&) const = default;

 private:
  int cutoff_;
};

/// Rejects cutoff < 1: cos^2 and sin^2 need at least the m = +-1 couplings.
BasisSpec build_basis(int cutoff);

/// Normalized pure state of the rotor in the m-basis.
class RotorState {
 public:
  /// Throws InvalidArgument unless coeffs has length dim and unit norm (1e-10).
  RotorState(BasisSpec basis, ComplexVector coeffs);

  static RotorState basis_state(const BasisSpec& basis, int m);
  /// Rescales coeffs to unit norm.
  static RotorState normalized(const BasisSpec& basis, ComplexVector coeffs);

  const BasisSpec& basis() const { return basis_; }
  const ComplexVector& coeffs() const { return coeffs_; }
  Complex amplitude(int m) const { return coeffs_[basis_.index_of(m)]; }

  double norm() const { return coeffs_.norm(); }
  std::vector<double> populations() const;
  /// Population in the two outermost states |+-M>.
  double edge_population() const;

 private:
  BasisSpec basis_;
  ComplexVector coeffs_;
};

class AngularOperator {
 public:
  /// When hermitian is set the matrix must satisfy max|A - A^dagger| < 1e-12.
  AngularOperator(BasisSpec basis, ComplexMatrix matrix, bool hermitian);

  const BasisSpec& basis() const { return basis_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }

 private:
  BasisSpec basis_;
  ComplexMatrix matrix_;
  bool hermitian_;
};

AngularOperator cos_op(const BasisSpec& basis);
AngularOperator sin_op(const BasisSpec& basis);
/// diag(m^2), i.e. -d^2/dphi^2 with B = 1.
AngularOperator kinetic_op(const BasisSpec& basis);

/// Field-free double commutators [H0,[H0,cos]] and [H0,[H0,sin]] (B = 1):
///   A_x = C + 4i S diag(m) + 4 C diag(m^2)
///   A_y = S - 4i C diag(m) + 4 S diag(m^2)
std::pair<AngularOperator, AngularOperator> accel_ops(const BasisSpec& basis);

/// <psi|A|psi>. Throws BasisMismatch if the bases differ.
Complex expectation(const RotorState& state, const AngularOperator& op);
/// Real part of <psi|A|psi>; requires a Hermitian-flagged operator.
double expectation_real(const RotorState& state, const AngularOperator& op);

/// max_ij |A_ij - conj(A_ji)|
double hermiticity_defect(const ComplexMatrix& matrix);

/// Every time-independent operator the tracking loop needs, built once per basis.
struct RotorOperators {
  explicit RotorOperators(const BasisSpec& basis);

  BasisSpec basis;
  AngularOperator cos;
  AngularOperator sin;
  AngularOperator kinetic;
  AngularOperator accel_x;
  AngularOperator accel_y;
  /// i[H0, cos] and i[H0, sin]: the field-independent velocity operators.
  AngularOperator velocity_x;
  AngularOperator velocity_y;
};

/// Shared immutable operator set for a basis. Thread-safe.
std::shared_ptr<const RotorOperators> operators_for(const BasisSpec& basis);

}  // namespace rotortrack

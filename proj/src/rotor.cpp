#include "rotortrack/rotor.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "rotortrack/errors.hpp"

namespace rotortrack {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kHermitianTolerance = 1e-12;
const Complex kI(0.0, 1.0);

ComplexMatrix m_diagonal(const BasisSpec& basis, int power) {
  ComplexMatrix d = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) d(i, i) = std::pow(static_cast<double>(basis.m_at(i)), power);
  return d;
}

void require_same_basis(const BasisSpec& a, const BasisSpec& b) {
  if (!(a == b)) {
    throw BasisMismatch("basis mismatch: cutoff " + std::to_string(a.cutoff()) + " vs " +
                        std::to_string(b.cutoff()));
  }
}

}  // namespace

BasisSpec::BasisSpec(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 1) {
    throw InvalidArgument("basis cutoff M must be >= 1 (got " + std::to_string(cutoff) +
                          "); cos/sin couplings need m = +-1");
  }
}

std::vector<int> BasisSpec::m_values() const {
  std::vector<int> values(dim());
  for (int i = 0; i < dim(); ++i) values[i] = m_at(i);
  return values;
}

BasisSpec build_basis(int cutoff) { return BasisSpec(cutoff); }

RotorState::RotorState(BasisSpec basis, ComplexVector coeffs) : basis_(basis), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_.dim()) {
    throw InvalidArgument("state has " + std::to_string(coeffs_.size()) + " coefficients, basis needs " +
                          std::to_string(basis_.dim()));
  }
  if (!coeffs_.allFinite()) throw NonFinite("state coefficients");
  if (std::abs(coeffs_.squaredNorm() - 1.0) > kNormTolerance) {
    throw InvalidArgument("state is not normalized (|psi|^2 = " + std::to_string(coeffs_.squaredNorm()) + ")");
  }
}

RotorState RotorState::basis_state(const BasisSpec& basis, int m) {
  if (m < -basis.cutoff() || m > basis.cutoff()) {
    throw InvalidArgument("m = " + std::to_string(m) + " outside the basis");
  }
  ComplexVector c = ComplexVector::Zero(basis.dim());
  c[basis.index_of(m)] = 1.0;
  return RotorState(basis, std::move(c));
}

RotorState RotorState::normalized(const BasisSpec& basis, ComplexVector coeffs) {
  const double n = coeffs.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  coeffs /= n;
  return RotorState(basis, std::move(coeffs));
}

std::vector<double> RotorState::populations() const {
  std::vector<double> p(coeffs_.size());
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) p[i] = std::norm(coeffs_[i]);
  return p;
}

double RotorState::edge_population() const {
  return std::norm(coeffs_[0]) + std::norm(coeffs_[coeffs_.size() - 1]);
}

AngularOperator::AngularOperator(BasisSpec basis, ComplexMatrix matrix, bool hermitian)
    : basis_(basis), matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (matrix_.rows() != basis_.dim() || matrix_.cols() != basis_.dim()) {
    throw InvalidArgument("operator matrix does not match basis dimension");
  }
  if (hermitian_ && hermiticity_defect(matrix_) >= kHermitianTolerance) {
    throw InvalidArgument("operator flagged Hermitian but max|A - A^dagger| = " +
                          std::to_string(hermiticity_defect(matrix_)));
  }
}

double hermiticity_defect(const ComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) return INFINITY;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

AngularOperator cos_op(const BasisSpec& basis) {
  const int n = basis.dim();
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    c(i, i + 1) = 0.5;
    c(i + 1, i) = 0.5;
  }
  return AngularOperator(basis, std::move(c), true);
}

AngularOperator sin_op(const BasisSpec& basis) {
  // <m|sin|m'> = -i/2 (delta_{m,m'+1} - delta_{m,m'-1})
  const int n = basis.dim();
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    s(i, i + 1) = 0.5 * kI;
    s(i + 1, i) = -0.5 * kI;
  }
  return AngularOperator(basis, std::move(s), true);
}

AngularOperator kinetic_op(const BasisSpec& basis) {
  return AngularOperator(basis, m_diagonal(basis, 2), true);
}

std::pair<AngularOperator, AngularOperator> accel_ops(const BasisSpec& basis) {
  // d/dphi -> i diag(m), d^2/dphi^2 -> -diag(m^2)
  const ComplexMatrix c = cos_op(basis).matrix();
  const ComplexMatrix s = sin_op(basis).matrix();
  const ComplexMatrix m1 = m_diagonal(basis, 1);
  const ComplexMatrix m2 = m_diagonal(basis, 2);
  ComplexMatrix ax = c + 4.0 * kI * s * m1 + 4.0 * c * m2;
  ComplexMatrix ay = s - 4.0 * kI * c * m1 + 4.0 * s * m2;
  return {AngularOperator(basis, std::move(ax), true), AngularOperator(basis, std::move(ay), true)};
}

Complex expectation(const RotorState& state, const AngularOperator& op) {
  require_same_basis(state.basis(), op.basis());
  return state.coeffs().dot(op.matrix() * state.coeffs());
}

double expectation_real(const RotorState& state, const AngularOperator& op) {
  if (!op.hermitian()) throw InvalidArgument("expectation_real needs a Hermitian operator");
  return expectation(state, op).real();
}

namespace {

AngularOperator velocity_op(const AngularOperator& kinetic, const AngularOperator& op) {
  ComplexMatrix v = kI * (kinetic.matrix() * op.matrix() - op.matrix() * kinetic.matrix());
  return AngularOperator(op.basis(), std::move(v), true);
}

}  // namespace

RotorOperators::RotorOperators(const BasisSpec& b)
    : basis(b),
      cos(cos_op(b)),
      sin(sin_op(b)),
      kinetic(kinetic_op(b)),
      accel_x(accel_ops(b).first),
      accel_y(accel_ops(b).second),
      velocity_x(velocity_op(kinetic, cos)),
      velocity_y(velocity_op(kinetic, sin)) {}

std::shared_ptr<const RotorOperators> operators_for(const BasisSpec& basis) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const RotorOperators>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[basis.cutoff()];
  if (!slot) slot = std::make_shared<const RotorOperators>(basis);
  return slot;
}

}  // namespace rotortrack

#include "rotortrack/generic_tracking.hpp"

#include <cmath>
#include <sstream>

#include "rotortrack/errors.hpp"

namespace rotortrack {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kRealTolerance = 1e-10;

void require_hermitian(const ComplexMatrix& m, const char* name, Eigen::Index dim) {
  if (m.rows() != dim || m.cols() != dim) {
    throw InvalidArgument(std::string(name) + " does not match the state dimension");
  }
  if (hermiticity_defect(m) >= kHermitianTolerance) throw InvalidArgument(std::string(name) + " is not Hermitian");
}

}  // namespace

double generic_field_k0(const ComplexMatrix& h0, const ComplexMatrix& mu, const ComplexMatrix& observable,
                        const ComplexVector& psi, double d_observable_dt, double tol) {
  const Eigen::Index dim = psi.size();
  require_hermitian(h0, "H0", dim);
  require_hermitian(mu, "mu", dim);
  require_hermitian(observable, "O", dim);
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("state is not normalized");
  if (!std::isfinite(d_observable_dt)) throw NonFinite("designated derivative");

  const ComplexMatrix mu_o = mu * observable - observable * mu;
  if (mu_o.cwiseAbs().maxCoeff() < tol) {
    throw CommutingObservable("[mu, O] vanishes; higher time derivatives would be required");
  }
  const Complex denominator = psi.dot(mu_o * psi);
  if (std::abs(denominator) < tol) {
    std::ostringstream os;
    os << "|<[mu, O]>| = " << std::abs(denominator) << " below tolerance " << tol;
    throw TrackingSingularity(os.str());
  }
  const ComplexMatrix h0_o = h0 * observable - observable * h0;
  const Complex numerator = Complex(0.0, d_observable_dt) + psi.dot(h0_o * psi);
  const Complex field = numerator / denominator;
  if (std::abs(field.imag()) > kRealTolerance * std::max(1.0, std::abs(field.real()))) {
    throw InvalidArgument("tracking field is not real; check operator Hermiticity");
  }
  return field.real();
}

double generic_field_k0(const ComplexMatrix& h0, const ComplexMatrix& mu, const ComplexMatrix& observable,
                        const ComplexVector& psi, double d_observable_dt) {
  return generic_field_k0(h0, mu, observable, psi, d_observable_dt, 1e-10 * static_cast<double>(psi.size()));
}

}  // namespace rotortrack

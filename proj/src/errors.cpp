#include "rotortrack/errors.hpp"

#include <sstream>

namespace rotortrack {

namespace {

std::string guard_message(SingularityGuard::Reason reason, double t, double det, double margin) {
  std::ostringstream os;
  os << "SingularityGuard at t=" << t << ": ";
  switch (reason) {
    case SingularityGuard::Reason::kDeterminant: os << "determinant below floor"; break;
    case SingularityGuard::Reason::kMargin: os << "unit-circle margin below floor"; break;
    case SingularityGuard::Reason::kBoth: os << "determinant and unit-circle margin below floors"; break;
  }
  os << " (D=" << det << ", margin=" << margin << "); keep the track strictly inside the unit disk";
  return os.str();
}

std::string leakage_message(double t, double edge, int cutoff) {
  std::ostringstream os;
  os << "BasisLeakage at t=" << t << ": population " << edge << " in |m|=" << cutoff
     << " exceeds tolerance; increase the basis cutoff M";
  return os.str();
}

}  // namespace

std::string to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularityGuard: return "SingularityGuard";
    case ErrorCode::kBasisLeakage: return "BasisLeakage";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kNonConvergent: return "NonConvergent";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNonUniformSampling: return "NonUniformSampling";
    case ErrorCode::kDataFormat: return "DataFormat";
    case ErrorCode::kCommutingObservable: return "CommutingObservable";
    case ErrorCode::kTrackingSingularity: return "TrackingSingularity";
  }
  return "Error";
}

SingularityGuard::SingularityGuard(Reason reason, double t, double determinant, double margin)
    : Error(ErrorCode::kSingularityGuard, guard_message(reason, t, determinant, margin)),
      reason_(reason),
      t_(t),
      determinant_(determinant),
      margin_(margin) {}

BasisLeakage::BasisLeakage(double t, double edge_population, int cutoff)
    : Error(ErrorCode::kBasisLeakage, leakage_message(t, edge_population, cutoff)),
      t_(t),
      edge_population_(edge_population) {}

}  // namespace rotortrack

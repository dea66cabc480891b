#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace rotortrack {

struct SimulationRecord;

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  kSingularityGuard = 2,
  kBasisLeakage = 3,
  kConfig = 4,
  kGridMismatch = 5,
  kNonConvergent = 6,
  kNonFinite = 7,
  kNonUniformSampling = 8,
  kDataFormat = 9,
  kCommutingObservable = 10,
  kTrackingSingularity = 11,
};

/// Short name of the category, e.g. "BasisLeakage".
std::string to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Rejected input: violated preconditions, bad configuration values.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : InvalidArgument(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

class BasisMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Track construction failures (admissibility, data size).
class TrackError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class PointOutsideDisk : public TrackError {
 public:
  PointOutsideDisk(std::size_t index, double radius)
      : TrackError("PointOutsideDisk: point " + std::to_string(index) + " has radius " +
                   std::to_string(radius) + " (tracks must stay strictly inside the unit disk)"),
        index_(index),
        radius_(radius) {}
  std::size_t index() const { return index_; }
  double radius() const { return radius_; }

 private:
  std::size_t index_;
  double radius_;
};

class TooFewPoints : public TrackError {
 public:
  explicit TooFewPoints(std::size_t n)
      : TrackError("TooFewPoints: data track needs at least 4 points, got " + std::to_string(n)) {}
};

class DataFormatError : public Error {
 public:
  explicit DataFormatError(const std::string& what) : Error(ErrorCode::kDataFormat, what) {}
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error(ErrorCode::kGridMismatch, "GridMismatch: " + what) {}
};

class NonUniformSampling : public Error {
 public:
  explicit NonUniformSampling(const std::string& what)
      : Error(ErrorCode::kNonUniformSampling, "NonUniformSampling: " + what) {}
};

class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what) : Error(ErrorCode::kNonFinite, "NonFinite: " + what) {}
};

class NonConvergent : public Error {
 public:
  NonConvergent(double t, const std::string& what)
      : Error(ErrorCode::kNonConvergent, "NonConvergent at t=" + std::to_string(t) + ": " + what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// Raised when the two-field system is too close to singular to solve.
/// Carries the partial record of the run when thrown from a propagation loop.
class SingularityGuard : public Error {
 public:
  enum class Reason { kDeterminant, kMargin, kBoth };

  SingularityGuard(Reason reason, double t, double determinant, double margin);

  Reason reason() const { return reason_; }
  double t() const { return t_; }
  double determinant() const { return determinant_; }
  double margin() const { return margin_; }
  const std::shared_ptr<const SimulationRecord>& partial_record() const { return partial_; }
  void attach_record(std::shared_ptr<const SimulationRecord> record) { partial_ = std::move(record); }

 private:
  Reason reason_;
  double t_;
  double determinant_;
  double margin_;
  std::shared_ptr<const SimulationRecord> partial_;
};

class BasisLeakage : public Error {
 public:
  BasisLeakage(double t, double edge_population, int cutoff);

  double t() const { return t_; }
  double edge_population() const { return edge_population_; }
  const std::shared_ptr<const SimulationRecord>& partial_record() const { return partial_; }
  void attach_record(std::shared_ptr<const SimulationRecord> record) { partial_ = std::move(record); }

 private:
  double t_;
  double edge_population_;
  std::shared_ptr<const SimulationRecord> partial_;
};

/// Generic single-field engine: [mu, O] vanishes identically.
class CommutingObservable : public Error {
 public:
  explicit CommutingObservable(const std::string& what)
      : Error(ErrorCode::kCommutingObservable, "CommutingObservable: " + what) {}
};

/// Generic single-field engine: <[mu, O]> passes through zero.
class TrackingSingularity : public Error {
 public:
  explicit TrackingSingularity(const std::string& what)
      : Error(ErrorCode::kTrackingSingularity, "Singularity: " + what) {}
};

}  // namespace rotortrack

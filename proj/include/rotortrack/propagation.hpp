#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rotortrack/field_solver.hpp"
#include "rotortrack/rotor.hpp"
#include "rotortrack/track.hpp"

namespace rotortrack {

enum class ConsistencyMode { kWarn, kStrict };

struct SimParams {
  double dt = 1e-4;
  double duration = 50.0;
  /// Midpoint self-consistency iterations per step; 0 holds the step-start field.
  int midpoint_iters = 0;
  double leakage_tol = 1e-6;
  /// Record every n-th step; 0 picks the smallest stride giving <= 20000 rows.
  int record_stride = 0;
  ConsistencyMode consistency = ConsistencyMode::kWarn;
  double consistency_tol = 1e-6;

  void validate() const;
  /// Number of steps N = ceil(T/dt); the effective step is T/N.
  long step_count() const;
  double effective_dt() const;
  int effective_stride() const;
};

struct RecordSample {
  double t = 0.0;
  FieldSample field;
  double ox = 0.0;
  double oy = 0.0;
  double ox_d = 0.0;
  double oy_d = 0.0;
  double determinant = 0.0;
  double margin = 0.0;
  double norm = 0.0;
  std::vector<double> populations;
};

struct SimulationRecord {
  BasisSpec basis{1};
  double dt = 0.0;
  double duration = 0.0;
  bool has_designated = false;
  std::vector<RecordSample> samples;
  /// Field held over [t_k, t_k + dt) for k = 0..N-1, plus the field at t = T.
  std::vector<FieldSample> fields;
  /// Max |<cos> - x_d| and |<sin> - y_d| over every step (not just recorded rows).
  double max_deviation_x = 0.0;
  double max_deviation_y = 0.0;
  double rms_deviation = 0.0;
  std::optional<ConsistencyReport> consistency;
  std::vector<std::string> warnings;

  double max_deviation() const { return std::max(max_deviation_x, max_deviation_y); }
};

/// Exact short-time propagator exp(-i H dt) for
/// H = diag(m^2) - eps_x C - eps_y S.
///
/// With r = |eps| and theta = atan2(eps_y, eps_x), eps_x C + eps_y S = r cos(phi - theta)
/// = U (r C) U^dagger where U = diag(exp(-i m theta)), so H = U (K - r C) U^dagger with a
/// real symmetric tridiagonal middle factor. That factor commutes with the parity
/// m -> -m and splits into an even block (dim M+1) and an odd block (dim M), each
/// diagonalized separately. Holds scratch buffers: one instance per run.
class Propagator {
 public:
  explicit Propagator(const BasisSpec& basis);

  const BasisSpec& basis() const { return basis_; }

  /// psi <- exp(-i H dt) psi in place.
  void advance(ComplexVector& psi, double eps_x, double eps_y, double dt);

 private:
  struct Block {
    explicit Block(int size);
    /// exp(-i T dt) applied to (re, im) in place.
    void apply(double r, double dt, double first_coupling, Eigen::VectorXd& re, Eigen::VectorXd& im);

    Eigen::MatrixXd matrix;
    Eigen::VectorXd diag;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    Eigen::VectorXd tmp_re, tmp_im;
  };

  BasisSpec basis_;
  Block even_;
  Block odd_;
  ComplexVector phases_;
  Eigen::VectorXd even_re_, even_im_, odd_re_, odd_im_;
};

/// Throws NonFinite on non-finite fields or dt.
RotorState step(const RotorState& state, const FieldSample& fields, double dt);

/// Closed-loop tracking: at every step solve for the fields from the current state
/// and the track's second derivatives, then propagate. Throws SingularityGuard,
/// BasisLeakage or NonConvergent with the partial record attached (where applicable),
/// and InvalidArgument when consistency is strict and the check fails.
SimulationRecord run_tracking(const RotorState& state0, const Track& track, const GuardConfig& guard,
                              const SimParams& params);

enum class FieldInterpolation { kHold, kLinear };

/// Open-loop propagation under a sampled field series on a uniform grid covering
/// [0, T]. If `reference` is given its values are recorded as the designated track
/// and deviations are measured against it. Throws GridMismatch.
SimulationRecord run_replay(const RotorState& state0, std::span<const FieldSample> series, const SimParams& params,
                            FieldInterpolation interpolation = FieldInterpolation::kHold,
                            const Track* reference = nullptr);

/// Low-passes both field components of a uniformly sampled series.
std::vector<FieldSample> filter_fields(std::span<const FieldSample> series, double cutoff);

}  // namespace rotortrack

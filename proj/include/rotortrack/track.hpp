#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rotortrack/rotor.hpp"

namespace rotortrack {

struct TrackPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Designated orientation (x_d, y_d) = (<cos>_d, <sin>_d) with its time derivatives.
struct TrackSample {
  double t = 0.0;
  double x_d = 0.0;
  double y_d = 0.0;
  double dx_d = 0.0;
  double dy_d = 0.0;
  double d2x_d = 0.0;
  double d2y_d = 0.0;
};

enum class TrackKind { kGaussian, kSpiral, kData, kFunction, kBlended };

std::string to_string(TrackKind kind);

namespace detail {

class TrackModel {
 public:
  virtual ~TrackModel() = default;
  virtual TrackPoint value(double t) const = 0;
  /// Whether first()/second() are available; otherwise finite differences are used.
  virtual bool has_derivatives() const { return false; }
  virtual TrackPoint first(double t) const { return value(t); }
  virtual TrackPoint second(double t) const { return value(t); }
};

}  // namespace detail

/// Immutable designated trajectory on [0, T]. Cheap to copy; evaluation is reentrant.
class Track {
 public:
  Track(TrackKind kind, double duration, std::shared_ptr<const detail::TrackModel> model);

  TrackKind kind() const { return kind_; }
  double duration() const { return duration_; }

  TrackPoint value(double t) const { return model_->value(t); }
  TrackPoint first_derivative(double t) const;
  /// Analytic where the kind provides it, finite differences otherwise.
  TrackPoint second_derivative(double t) const;
  TrackSample sample(double t) const;

  /// Five-point finite differences with h = T * 1e-4, one-sided near 0 and T.
  TrackPoint fd_first_derivative(double t) const;
  TrackPoint fd_second_derivative(double t) const;

  /// max over `samples` uniformly spaced t in [0, T] of sqrt(x_d^2 + y_d^2).
  double max_radius(int samples = 10000) const;

 private:
  TrackKind kind_;
  double duration_;
  std::shared_ptr<const detail::TrackModel> model_;
};

/// Perpendicular Gaussians peaking at 0.4T (x) and 0.8T (y), width T/15.
struct GaussianParams {
  double alpha = 0.9;
  double duration = 50.0;
  double x_center = 0.4;  // fractions of T
  double y_center = 0.8;
  double width = 1.0 / 15.0;
};

Track gaussian_track(const GaussianParams& params);
/// Requires 0 < alpha < 1 and T > 0.
Track gaussian_track(double alpha, double duration);

/// x_d = beta t sin(omega t) f(t), y_d = beta t cos(omega t) f(t),
/// f(t) = (1 + c1 exp(-c2 t))^(-1/c3).
struct SpiralParams {
  double beta = 0.95 / 150.0;
  double omega = 0.5;
  double c1 = 150.0 / 4.0;
  double c2 = 1.0;
  double c3 = 0.2;
  double duration = 150.0;

  /// Smooth-start defaults for horizon T: beta = 0.95/T, omega = 1/2, c1 = T/4,
  /// c3 = 0.2 and c2 = 1 (reduced time), so that f(T/10) > 0.99 for T = 150.
  static SpiralParams preset(double duration = 150.0);
  /// Same, with the literal c2 = 2e-4 interpreted in reduced time.
  static SpiralParams literal(double duration = 150.0);
};

/// Requires beta*T < 1, c1 > 0, c3 > 0.
Track spiral_track(const SpiralParams& params);
Track spiral_track(double beta, double omega, double c1, double c2, double c3, double duration);

/// Raw data-track input. `t` is empty or holds one explicit time per point.
struct TrackData {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> t;
};

enum class Parameterization { kIndex, kArcLength };

struct DataTrackOptions {
  double duration = 50.0;
  Parameterization parameterization = Parameterization::kIndex;
  /// When > 0, points are linearly re-interpolated onto this many uniform times first.
  std::size_t resample_n = 0;
  /// When > 0, low-pass the (uniform) point sequence at this frequency before splining.
  double smooth_cutoff = 0.0;
  /// When > 0, scale points so the largest radius equals this value.
  double rescale_to = 0.0;
};

/// Cubic spline through the (optionally rescaled, resampled, smoothed) points on [0, T].
/// Explicit times are shifted to start at 0 and stretched to T.
/// Throws TooFewPoints (< 4), PointOutsideDisk, or TrackError if the spline leaves the disk.
Track data_track(const TrackData& data, const DataTrackOptions& options);

/// Reads CSV with header `x,y` or `x,y,t`. Throws DataFormatError.
TrackData read_track_csv(const std::string& path);

/// Value-only track; derivatives come from finite differences.
Track function_track(std::function<TrackPoint(double)> fn, double duration);

/// Multiplies a track by the cosine ramp (1 - cos(pi t / window)) / 2 on [0, window]
/// so it starts at the origin with zero slope.
Track blend_in(const Track& track, double window);

struct ConsistencyReport {
  bool pass = false;
  double value_residual_x = 0.0;
  double value_residual_y = 0.0;
  double slope_residual_x = 0.0;
  double slope_residual_y = 0.0;
  double tolerance = 0.0;

  double max_residual() const;
};

/// Compares <cos>, <sin> and their field-free first derivatives i<[H0, O]> at t = 0
/// against the track. Never throws on mismatch.
ConsistencyReport consistency_check(const RotorState& state0, const Track& track, double tol);

}  // namespace rotortrack

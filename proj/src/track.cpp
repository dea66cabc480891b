#include "rotortrack/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rotortrack/errors.hpp"
#include "rotortrack/filter.hpp"
#include "rotortrack/spline.hpp"
#include "rotortrack/units.hpp"

namespace rotortrack {

std::string to_string(TrackKind kind) {
  switch (kind) {
    case TrackKind::kGaussian: return "gaussian";
    case TrackKind::kSpiral: return "spiral";
    case TrackKind::kData: return "data";
    case TrackKind::kFunction: return "function";
    case TrackKind::kBlended: return "blended";
  }
  return "unknown";
}

Track::Track(TrackKind kind, double duration, std::shared_ptr<const detail::TrackModel> model)
    : kind_(kind), duration_(duration), model_(std::move(model)) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("track duration T must be positive");
  if (!model_) throw InvalidArgument("track model is null");
}

TrackPoint Track::first_derivative(double t) const {
  return model_->has_derivatives() ? model_->first(t) : fd_first_derivative(t);
}

TrackPoint Track::second_derivative(double t) const {
  return model_->has_derivatives() ? model_->second(t) : fd_second_derivative(t);
}

TrackSample Track::sample(double t) const {
  const TrackPoint v = value(t);
  const TrackPoint d1 = first_derivative(t);
  const TrackPoint d2 = second_derivative(t);
  return {t, v.x, v.y, d1.x, d1.y, d2.x, d2.y};
}

namespace {

// Stencil offsets k*h with weights, for central or one-sided five-point rules.
struct Stencil {
  double offsets[5];
  double weights[5];
  double divisor;
};

constexpr Stencil kCentralFirst{{-2, -1, 0, 1, 2}, {1, -8, 0, 8, -1}, 12.0};
constexpr Stencil kCentralSecond{{-2, -1, 0, 1, 2}, {-1, 16, -30, 16, -1}, 12.0};
constexpr Stencil kForwardFirst{{0, 1, 2, 3, 4}, {-25, 48, -36, 16, -3}, 12.0};
constexpr Stencil kForwardSecond{{0, 1, 2, 3, 4}, {35, -104, 114, -56, 11}, 12.0};

TrackPoint apply(const detail::TrackModel& model, const Stencil& s, double t, double h, double direction,
                 int order) {
  TrackPoint acc;
  for (int k = 0; k < 5; ++k) {
    if (s.weights[k] == 0.0) continue;
    const TrackPoint p = model.value(t + direction * s.offsets[k] * h);
    acc.x += s.weights[k] * p.x;
    acc.y += s.weights[k] * p.y;
  }
  // Mirrored stencils flip the sign of odd derivatives.
  const double scale = (order == 1 ? direction : 1.0) / (s.divisor * std::pow(h, order));
  return {acc.x * scale, acc.y * scale};
}

}  // namespace

namespace {

// h = T * 1e-4. At T * 1e-5 rounding in O(1) track values already costs ~1e-6
// in the second derivative; the five-point truncation error at 1e-4 is far smaller.
constexpr double kFdStepFraction = 1e-4;

// Step rounded so that t + h is exactly representable; removes the step error
// from the stencil, leaving only rounding in the function values.
double exact_step(double t, double h) {
  volatile double shifted = t + h;
  return shifted - t;
}

}  // namespace

TrackPoint Track::fd_first_derivative(double t) const {
  const double h = exact_step(t, duration_ * kFdStepFraction);
  if (t - 2.0 * h < 0.0) return apply(*model_, kForwardFirst, t, h, 1.0, 1);
  if (t + 2.0 * h > duration_) return apply(*model_, kForwardFirst, t, h, -1.0, 1);
  return apply(*model_, kCentralFirst, t, h, 1.0, 1);
}

TrackPoint Track::fd_second_derivative(double t) const {
  const double h = exact_step(t, duration_ * kFdStepFraction);
  if (t - 2.0 * h < 0.0) return apply(*model_, kForwardSecond, t, h, 1.0, 2);
  if (t + 2.0 * h > duration_) return apply(*model_, kForwardSecond, t, h, -1.0, 2);
  return apply(*model_, kCentralSecond, t, h, 1.0, 2);
}

double Track::max_radius(int samples) const {
  double r = 0.0;
  const int n = std::max(samples, 2);
  for (int i = 0; i < n; ++i) {
    const TrackPoint p = value(duration_ * static_cast<double>(i) / static_cast<double>(n - 1));
    r = std::max(r, std::hypot(p.x, p.y));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gaussian

namespace {

class GaussianModel final : public detail::TrackModel {
 public:
  explicit GaussianModel(const GaussianParams& p)
      : alpha_(p.alpha), cx_(p.x_center * p.duration), cy_(p.y_center * p.duration), w_(p.width * p.duration) {}

  TrackPoint value(double t) const override { return {g(t, cx_), g(t, cy_)}; }
  bool has_derivatives() const override { return true; }
  TrackPoint first(double t) const override { return {d1(t, cx_), d1(t, cy_)}; }
  TrackPoint second(double t) const override { return {d2(t, cx_), d2(t, cy_)}; }

 private:
  double g(double t, double c) const {
    const double u = (t - c) / w_;
    return alpha_ * std::exp(-u * u);
  }
  double d1(double t, double c) const { return -2.0 * (t - c) / (w_ * w_) * g(t, c); }
  double d2(double t, double c) const {
    const double w2 = w_ * w_;
    const double s = t - c;
    return (4.0 * s * s / (w2 * w2) - 2.0 / w2) * g(t, c);
  }

  double alpha_, cx_, cy_, w_;
};

}  // namespace

Track gaussian_track(const GaussianParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) {
    throw TrackError("gaussian alpha must satisfy 0 < alpha < 1 (got " + std::to_string(p.alpha) +
                     "); the peak would reach the unit circle");
  }
  if (!(p.width > 0.0)) throw TrackError("gaussian width must be positive");
  if (!(p.duration > 0.0)) throw TrackError("track duration T must be positive");
  Track track(TrackKind::kGaussian, p.duration, std::make_shared<GaussianModel>(p));
  if (track.max_radius() >= 1.0) throw TrackError("gaussian track leaves the unit disk");
  return track;
}

Track gaussian_track(double alpha, double duration) {
  GaussianParams p;
  p.alpha = alpha;
  p.duration = duration;
  return gaussian_track(p);
}

// ---------------------------------------------------------------------------
// Spiral

SpiralParams SpiralParams::preset(double duration) {
  SpiralParams p;
  p.duration = duration;
  p.beta = 0.95 / duration;
  p.omega = 0.5;
  p.c1 = duration / 4.0;
  p.c2 = 1.0;
  p.c3 = 0.2;
  return p;
}

SpiralParams SpiralParams::literal(double duration) {
  SpiralParams p = preset(duration);
  p.c2 = 2e-4;
  return p;
}

namespace {

class SpiralModel final : public detail::TrackModel {
 public:
  explicit SpiralModel(const SpiralParams& p) : p_(p) {}

  TrackPoint value(double t) const override {
    const double r = p_.beta * t * f(t);
    return {r * std::sin(p_.omega * t), r * std::cos(p_.omega * t)};
  }
  bool has_derivatives() const override { return true; }

  TrackPoint first(double t) const override {
    // (u v w)' with u = beta t, v = sin/cos(omega t), w = f
    const double u = p_.beta * t, du = p_.beta;
    const double w = f(t), dw = df(t);
    const double s = std::sin(p_.omega * t), c = std::cos(p_.omega * t);
    const double om = p_.omega;
    const double x = du * s * w + u * om * c * w + u * s * dw;
    const double y = du * c * w - u * om * s * w + u * c * dw;
    return {x, y};
  }

  TrackPoint second(double t) const override {
    // u'' = 0: (uvw)'' = u v'' w + u v w'' + 2 (u' v' w + u' v w' + u v' w')
    const double u = p_.beta * t, du = p_.beta;
    const double w = f(t), dw = df(t), ddw = d2f(t);
    const double om = p_.omega;
    const double s = std::sin(om * t), c = std::cos(om * t);
    const double x = u * (-om * om * s) * w + u * s * ddw + 2.0 * (du * om * c * w + du * s * dw + u * om * c * dw);
    const double y = u * (-om * om * c) * w + u * c * ddw + 2.0 * (-du * om * s * w + du * c * dw - u * om * s * dw);
    return {x, y};
  }

 private:
  // f = g^(-p), g = 1 + c1 exp(-c2 t), p = 1/c3
  double g(double t) const { return 1.0 + p_.c1 * std::exp(-p_.c2 * t); }
  double dg(double t) const { return -p_.c2 * p_.c1 * std::exp(-p_.c2 * t); }
  double d2g(double t) const { return p_.c2 * p_.c2 * p_.c1 * std::exp(-p_.c2 * t); }
  double f(double t) const { return std::pow(g(t), -1.0 / p_.c3); }
  double df(double t) const {
    const double p = 1.0 / p_.c3;
    return -p * std::pow(g(t), -p - 1.0) * dg(t);
  }
  double d2f(double t) const {
    const double p = 1.0 / p_.c3;
    const double gv = g(t), dgv = dg(t);
    return p * (p + 1.0) * std::pow(gv, -p - 2.0) * dgv * dgv - p * std::pow(gv, -p - 1.0) * d2g(t);
  }

  SpiralParams p_;
};

}  // namespace

Track spiral_track(const SpiralParams& p) {
  if (!(p.duration > 0.0)) throw TrackError("track duration T must be positive");
  if (!(p.beta >= 0.0) || !(p.beta * p.duration < 1.0)) {
    throw TrackError("spiral requires 0 <= beta*T < 1 (got beta*T = " + std::to_string(p.beta * p.duration) +
                     "); the final radius would touch the unit circle");
  }
  if (!(p.c1 > 0.0)) throw TrackError("spiral c1 must be positive");
  if (!(p.c3 > 0.0)) throw TrackError("spiral c3 must be positive");
  if (!std::isfinite(p.c2) || !std::isfinite(p.omega)) throw TrackError("spiral c2 and omega must be finite");
  return Track(TrackKind::kSpiral, p.duration, std::make_shared<SpiralModel>(p));
}

Track spiral_track(double beta, double omega, double c1, double c2, double c3, double duration) {
  return spiral_track(SpiralParams{beta, omega, c1, c2, c3, duration});
}

// ---------------------------------------------------------------------------
// Data

namespace {

class SplineModel final : public detail::TrackModel {
 public:
  SplineModel(CubicSpline x, CubicSpline y) : x_(std::move(x)), y_(std::move(y)) {}

  TrackPoint value(double t) const override { return {x_.value(t), y_.value(t)}; }
  bool has_derivatives() const override { return true; }
  TrackPoint first(double t) const override { return {x_.first_derivative(t), y_.first_derivative(t)}; }
  TrackPoint second(double t) const override { return {x_.second_derivative(t), y_.second_derivative(t)}; }

 private:
  CubicSpline x_;
  CubicSpline y_;
};

std::vector<double> linear_resample(const std::vector<double>& t, const std::vector<double>& v,
                                    const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (j + 2 < t.size() && t[j + 1] < grid[i]) ++j;
    const double a = (grid[i] - t[j]) / (t[j + 1] - t[j]);
    out[i] = v[j] + std::clamp(a, 0.0, 1.0) * (v[j + 1] - v[j]);
  }
  return out;
}

}  // namespace

Track data_track(const TrackData& data, const DataTrackOptions& options) {
  const std::size_t n = data.x.size();
  if (data.y.size() != n) throw TrackError("data track x and y columns differ in length");
  if (!data.t.empty() && data.t.size() != n) throw TrackError("data track t column length mismatch");
  if (n < 4) throw TooFewPoints(n);
  if (!(options.duration > 0.0)) throw TrackError("track duration T must be positive");

  std::vector<double> x = data.x, y = data.y;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw TrackError("non-finite point at index " + std::to_string(i));
  }
  if (options.rescale_to > 0.0) {
    double r_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) r_max = std::max(r_max, std::hypot(x[i], y[i]));
    if (r_max > 0.0) {
      const double s = options.rescale_to / r_max;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] *= s;
        y[i] *= s;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::hypot(x[i], y[i]);
    if (!(r < 1.0)) throw PointOutsideDisk(i, r);
  }

  const double T = options.duration;
  std::vector<double> t(n);
  if (!data.t.empty()) {
    const double t0 = data.t.front();
    const double span = data.t.back() - t0;
    for (std::size_t i = 1; i < n; ++i) {
      if (!(data.t[i] > data.t[i - 1])) throw TrackError("explicit t column must be strictly increasing");
    }
    for (std::size_t i = 0; i < n; ++i) t[i] = (data.t[i] - t0) / span * T;
  } else if (options.parameterization == Parameterization::kArcLength) {
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) s[i] = s[i - 1] + std::hypot(x[i] - x[i - 1], y[i] - y[i - 1]);
    if (!(s.back() > 0.0)) throw TrackError("data track has zero arc length");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(s[i] > s[i - 1])) throw TrackError("repeated point at index " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) t[i] = s[i] / s.back() * T;
  } else {
    for (std::size_t i = 0; i < n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.back() = T;

  if (options.resample_n > 0) {
    if (options.resample_n < 4) throw TooFewPoints(options.resample_n);
    std::vector<double> grid(options.resample_n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = T * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    }
    x = linear_resample(t, x, grid);
    y = linear_resample(t, y, grid);
    t = std::move(grid);
  }
  if (options.smooth_cutoff > 0.0) {
    x = lowpass_filter(t, x, options.smooth_cutoff);
    y = lowpass_filter(t, y, options.smooth_cutoff);
  }

  Track track(TrackKind::kData, T, std::make_shared<SplineModel>(CubicSpline(t, x), CubicSpline(t, y)));
  const double r = track.max_radius();
  if (!(r < 1.0)) {
    throw TrackError("interpolated data track leaves the unit disk (max radius " + std::to_string(r) + ")");
  }
  return track;
}

TrackData read_track_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open track file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataFormatError("track file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const bool has_t = header.size() == 3 && header[2] == "t";
  if (header.size() < 2 || header[0] != "x" || header[1] != "y" || (header.size() == 3 && !has_t) ||
      header.size() > 3) {
    throw DataFormatError("track file '" + path + "' must have header 'x,y' or 'x,y,t'");
  }

  TrackData data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataFormatError("track file '" + path + "' line " + std::to_string(line_no) + ": bad number '" +
                              cell + "'");
      }
    }
    if (row.size() != header.size()) {
      throw DataFormatError("track file '" + path + "' line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " columns");
    }
    data.x.push_back(row[0]);
    data.y.push_back(row[1]);
    if (has_t) data.t.push_back(row[2]);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Function and blended tracks

namespace {

class FunctionModel final : public detail::TrackModel {
 public:
  explicit FunctionModel(std::function<TrackPoint(double)> fn) : fn_(std::move(fn)) {}
  TrackPoint value(double t) const override { return fn_(t); }

 private:
  std::function<TrackPoint(double)> fn_;
};

class BlendModel final : public detail::TrackModel {
 public:
  BlendModel(Track inner, double window) : inner_(std::move(inner)), window_(window) {}

  TrackPoint value(double t) const override {
    const TrackPoint p = inner_.value(t);
    const double w = ramp(t);
    return {w * p.x, w * p.y};
  }
  bool has_derivatives() const override { return true; }
  TrackPoint first(double t) const override {
    const TrackPoint p = inner_.value(t), d = inner_.first_derivative(t);
    const double w = ramp(t), dw = ramp_d1(t);
    return {dw * p.x + w * d.x, dw * p.y + w * d.y};
  }
  TrackPoint second(double t) const override {
    const TrackPoint p = inner_.value(t), d = inner_.first_derivative(t), dd = inner_.second_derivative(t);
    const double w = ramp(t), dw = ramp_d1(t), ddw = ramp_d2(t);
    return {ddw * p.x + 2.0 * dw * d.x + w * dd.x, ddw * p.y + 2.0 * dw * d.y + w * dd.y};
  }

 private:
  double ramp(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= window_) return 1.0;
    return 0.5 * (1.0 - std::cos(constants::kPi * t / window_));
  }
  double ramp_d1(double t) const {
    if (t <= 0.0 || t >= window_) return 0.0;
    const double k = constants::kPi / window_;
    return 0.5 * k * std::sin(k * t);
  }
  double ramp_d2(double t) const {
    if (t < 0.0 || t > window_) return 0.0;
    const double k = constants::kPi / window_;
    return 0.5 * k * k * std::cos(k * t);
  }

  Track inner_;
  double window_;
};

}  // namespace

Track function_track(std::function<TrackPoint(double)> fn, double duration) {
  if (!fn) throw InvalidArgument("function track needs a callable");
  return Track(TrackKind::kFunction, duration, std::make_shared<FunctionModel>(std::move(fn)));
}

Track blend_in(const Track& track, double window) {
  if (!(window > 0.0) || !(window <= track.duration())) {
    throw TrackError("blend-in window must lie in (0, T]");
  }
  return Track(TrackKind::kBlended, track.duration(), std::make_shared<BlendModel>(track, window));
}

// ---------------------------------------------------------------------------

double ConsistencyReport::max_residual() const {
  return std::max({std::abs(value_residual_x), std::abs(value_residual_y), std::abs(slope_residual_x),
                   std::abs(slope_residual_y)});
}

ConsistencyReport consistency_check(const RotorState& state0, const Track& track, double tol) {
  const auto ops = operators_for(state0.basis());
  const TrackSample s = track.sample(0.0);
  ConsistencyReport r;
  r.tolerance = tol;
  r.value_residual_x = expectation_real(state0, ops->cos) - s.x_d;
  r.value_residual_y = expectation_real(state0, ops->sin) - s.y_d;
  r.slope_residual_x = expectation_real(state0, ops->velocity_x) - s.dx_d;
  r.slope_residual_y = expectation_real(state0, ops->velocity_y) - s.dy_d;
  r.pass = r.max_residual() < tol;
  return r;
}

}  // namespace rotortrack

#include "rotortrack/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "rotortrack/errors.hpp"
#include "rotortrack/filter.hpp"

namespace rotortrack {

namespace {

constexpr int kMaxRecordRows = 20000;
constexpr double kMidpointTol = 1e-12;

}  // namespace

void SimParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("T must be positive");
  if (dt > duration) throw InvalidArgument("dt must not exceed T");
  if (midpoint_iters < 0 || midpoint_iters > 8) throw InvalidArgument("midpoint_iters must be in [0, 8]");
  if (!(leakage_tol > 0.0)) throw InvalidArgument("leakage_tol must be positive");
  if (record_stride < 0) throw InvalidArgument("record_stride must be >= 0");
  if (!(consistency_tol > 0.0)) throw InvalidArgument("consistency_tol must be positive");
}

long SimParams::step_count() const {
  return std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
}

double SimParams::effective_dt() const { return duration / static_cast<double>(step_count()); }

int SimParams::effective_stride() const {
  if (record_stride > 0) return record_stride;
  const long rows = step_count() + 1;
  return static_cast<int>(std::max(1L, (rows + kMaxRecordRows - 1) / kMaxRecordRows));
}

// ---------------------------------------------------------------------------

Propagator::Block::Block(int size)
    : matrix(Eigen::MatrixXd::Zero(size, size)), diag(size), solver(size), tmp_re(size), tmp_im(size) {}

void Propagator::Block::apply(double r, double dt, double first_coupling, Eigen::VectorXd& re,
                              Eigen::VectorXd& im) {
  const Eigen::Index n = diag.size();
  matrix.setZero();
  matrix.diagonal() = diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double c = i == 0 ? first_coupling : -0.5 * r;
    matrix(i, i + 1) = c;
    matrix(i + 1, i) = c;
  }
  // Dense solve on purpose: Eigen 3.4 computeFromTridiagonal returns inconsistent
  // eigenpairs for some coupling strengths.
  solver.compute(matrix, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  tmp_re.noalias() = v.transpose() * re;
  tmp_im.noalias() = v.transpose() * im;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex z = Complex(tmp_re[k], tmp_im[k]) * std::polar(1.0, -lambda[k] * dt);
    tmp_re[k] = z.real();
    tmp_im[k] = z.imag();
  }
  re.noalias() = v * tmp_re;
  im.noalias() = v * tmp_im;
}

Propagator::Propagator(const BasisSpec& basis)
    : basis_(basis),
      even_(basis.cutoff() + 1),
      odd_(basis.cutoff()),
      phases_(basis.dim()),
      even_re_(basis.cutoff() + 1),
      even_im_(basis.cutoff() + 1),
      odd_re_(basis.cutoff()),
      odd_im_(basis.cutoff()) {
  const int big_m = basis.cutoff();
  for (int k = 0; k <= big_m; ++k) even_.diag[k] = static_cast<double>(k) * k;
  for (int k = 1; k <= big_m; ++k) odd_.diag[k - 1] = static_cast<double>(k) * k;
}

void Propagator::advance(ComplexVector& psi, double eps_x, double eps_y, double dt) {
  const double r = std::hypot(eps_x, eps_y);
  const double theta = std::atan2(eps_y, eps_x);
  const int big_m = basis_.cutoff();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // w = U^dagger psi, then split into parity components.
  for (int i = 0; i < basis_.dim(); ++i) phases_[i] = std::polar(1.0, basis_.m_at(i) * theta);
  const Complex w0 = phases_[big_m] * psi[big_m];
  even_re_[0] = w0.real();
  even_im_[0] = w0.imag();
  for (int k = 1; k <= big_m; ++k) {
    const Complex wp = phases_[big_m + k] * psi[big_m + k];
    const Complex wm = phases_[big_m - k] * psi[big_m - k];
    const Complex e = (wp + wm) * inv_sqrt2;
    const Complex o = (wp - wm) * inv_sqrt2;
    even_re_[k] = e.real();
    even_im_[k] = e.imag();
    odd_re_[k - 1] = o.real();
    odd_im_[k - 1] = o.imag();
  }

  // <0|rC|e_1> picks up sqrt(2) from the symmetric combination.
  even_.apply(r, dt, -r * inv_sqrt2, even_re_, even_im_);
  odd_.apply(r, dt, -0.5 * r, odd_re_, odd_im_);

  psi[big_m] = std::conj(phases_[big_m]) * Complex(even_re_[0], even_im_[0]);
  for (int k = 1; k <= big_m; ++k) {
    const Complex e(even_re_[k], even_im_[k]);
    const Complex o(odd_re_[k - 1], odd_im_[k - 1]);
    psi[big_m + k] = std::conj(phases_[big_m + k]) * (e + o) * inv_sqrt2;
    psi[big_m - k] = std::conj(phases_[big_m - k]) * (e - o) * inv_sqrt2;
  }
}

RotorState step(const RotorState& state, const FieldSample& fields, double dt) {
  if (!std::isfinite(fields.eps_x) || !std::isfinite(fields.eps_y) || !std::isfinite(dt)) {
    throw NonFinite("step inputs");
  }
  Propagator prop(state.basis());
  ComplexVector psi = state.coeffs();
  prop.advance(psi, fields.eps_x, fields.eps_y, dt);
  return RotorState(state.basis(), std::move(psi));
}

// ---------------------------------------------------------------------------

namespace {

struct DeviationTracker {
  double max_x = 0.0;
  double max_y = 0.0;
  double sum_sq = 0.0;
  long count = 0;

  void add(double dx, double dy) {
    max_x = std::max(max_x, std::abs(dx));
    max_y = std::max(max_y, std::abs(dy));
    sum_sq += dx * dx + dy * dy;
    ++count;
  }
  void store(SimulationRecord& record) const {
    record.max_deviation_x = max_x;
    record.max_deviation_y = max_y;
    record.rms_deviation = count > 0 ? std::sqrt(sum_sq / (2.0 * static_cast<double>(count))) : 0.0;
  }
};

RecordSample make_sample(double t, const FieldSample& field, const OrientationMoments& m, double ox_d, double oy_d,
                         const ComplexVector& psi) {
  RecordSample s;
  s.t = t;
  s.field = field;
  s.ox = m.cx;
  s.oy = m.sy;
  s.ox_d = ox_d;
  s.oy_d = oy_d;
  s.determinant = determinant(m);
  s.margin = boundary_margin(m);
  s.norm = psi.norm();
  s.populations.resize(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) s.populations[i] = std::norm(psi[i]);
  return s;
}

template <typename E>
[[noreturn]] void rethrow_with_record(E& error, SimulationRecord& record, const DeviationTracker& dev) {
  dev.store(record);
  error.attach_record(std::make_shared<const SimulationRecord>(record));
  throw;
}

void check_leakage(const ComplexVector& psi, double t, const SimParams& params, int cutoff) {
  const double edge = std::norm(psi[0]) + std::norm(psi[psi.size() - 1]);
  if (edge > params.leakage_tol) throw BasisLeakage(t, edge, cutoff);
}

}  // namespace

SimulationRecord run_tracking(const RotorState& state0, const Track& track, const GuardConfig& guard,
                              const SimParams& params) {
  params.validate();
  guard.validate();
  if (params.duration > track.duration() * (1.0 + 1e-12)) {
    throw InvalidArgument("simulation horizon exceeds the track duration");
  }

  const BasisSpec basis = state0.basis();
  const auto ops = operators_for(basis);
  Propagator prop(basis);

  SimulationRecord record;
  record.basis = basis;
  record.duration = params.duration;
  record.has_designated = true;

  const ConsistencyReport report = consistency_check(state0, track, params.consistency_tol);
  record.consistency = report;
  if (!report.pass) {
    const std::string msg = "initial state inconsistent with track (max residual " +
                            std::to_string(report.max_residual()) + ")";
    if (params.consistency == ConsistencyMode::kStrict) throw InvalidArgument(msg);
    record.warnings.push_back(msg);
  }

  const long n_steps = params.step_count();
  const double dt = params.effective_dt();
  const int stride = params.effective_stride();
  record.dt = dt;
  record.fields.reserve(static_cast<std::size_t>(n_steps) + 1);
  record.samples.reserve(static_cast<std::size_t>(n_steps / stride) + 2);

  ComplexVector psi = state0.coeffs();
  ComplexVector half(psi.size());
  DeviationTracker dev;

  try {
    for (long k = 0; k <= n_steps; ++k) {
      const double t = k == n_steps ? params.duration : static_cast<double>(k) * dt;
      const OrientationMoments m = orientation_moments(psi, *ops);
      const TrackSample target = track.sample(t);
      dev.add(m.cx - target.x_d, m.sy - target.y_d);

      FieldSample field = solve_fields_from_moments(m, field_free_acceleration(psi, *ops), target.d2x_d,
                                                    target.d2y_d, guard, t);

      if (k < n_steps && params.midpoint_iters > 0) {
        const double t_mid = t + 0.5 * dt;
        const TrackPoint accel_mid = track.second_derivative(t_mid);
        double previous = std::numeric_limits<double>::infinity();
        for (int it = 0; it < params.midpoint_iters; ++it) {
          half = psi;
          prop.advance(half, field.eps_x, field.eps_y, 0.5 * dt);
          const FieldSample next = solve_fields_from_moments(orientation_moments(half, *ops),
                                                             field_free_acceleration(half, *ops), accel_mid.x,
                                                             accel_mid.y, guard, t_mid);
          const double delta = std::hypot(next.eps_x - field.eps_x, next.eps_y - field.eps_y);
          const double scale = 1.0 + std::hypot(next.eps_x, next.eps_y);
          field.eps_x = next.eps_x;
          field.eps_y = next.eps_y;
          if (delta <= kMidpointTol * scale) break;
          if (it > 0 && delta > previous) {
            throw NonConvergent(t, "midpoint field iteration is diverging (update " + std::to_string(delta) + ")");
          }
          previous = delta;
        }
      }

      record.fields.push_back(field);
      if (k % stride == 0 || k == n_steps) {
        record.samples.push_back(make_sample(t, field, m, target.x_d, target.y_d, psi));
      }
      if (k == n_steps) break;

      prop.advance(psi, field.eps_x, field.eps_y, dt);
      if (!psi.allFinite()) throw NonFinite("state after step at t=" + std::to_string(t));
      check_leakage(psi, t + dt, params, basis.cutoff());
    }
  } catch (SingularityGuard& e) {
    rethrow_with_record(e, record, dev);
  } catch (BasisLeakage& e) {
    rethrow_with_record(e, record, dev);
  }

  dev.store(record);
  return record;
}

SimulationRecord run_replay(const RotorState& state0, std::span<const FieldSample> series, const SimParams& params,
                            FieldInterpolation interpolation, const Track* reference) {
  params.validate();
  if (series.size() < 2) throw GridMismatch("field series needs at least two samples");
  for (const FieldSample& f : series) {
    if (!std::isfinite(f.t) || !std::isfinite(f.eps_x) || !std::isfinite(f.eps_y)) {
      throw NonFinite("field series contains NaN/Inf");
    }
  }
  std::vector<double> times(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) times[i] = series[i].t;
  double spacing = 0.0;
  try {
    spacing = uniform_spacing(times);
  } catch (const NonUniformSampling& e) {
    throw GridMismatch(e.what());
  }
  const double T = params.duration;
  if (std::abs(times.front()) > 1e-9 * std::max(1.0, T)) throw GridMismatch("field series must start at t = 0");
  if (std::abs(times.back() - T) > 1e-6 * spacing + 1e-9 * T) {
    throw GridMismatch("field series ends at t = " + std::to_string(times.back()) + ", expected T = " +
                       std::to_string(T));
  }
  if (reference != nullptr && T > reference->duration() * (1.0 + 1e-12)) {
    throw InvalidArgument("replay horizon exceeds the reference track duration");
  }

  const BasisSpec basis = state0.basis();
  const auto ops = operators_for(basis);
  Propagator prop(basis);

  const long n_steps = params.step_count();
  const double dt = params.effective_dt();
  const int stride = params.effective_stride();
  const std::size_t last = series.size() - 1;

  auto held = [&](double t) {
    const auto idx = static_cast<std::size_t>(std::floor(t / spacing + 1e-9));
    return series[std::min(idx, last)];
  };
  auto interpolated = [&](double t) {
    const double u = t / spacing;
    const auto idx = std::min(static_cast<std::size_t>(std::floor(u)), last - 1);
    const double a = std::clamp(u - static_cast<double>(idx), 0.0, 1.0);
    const FieldSample& lo = series[idx];
    const FieldSample& hi = series[idx + 1];
    return FieldSample{t, lo.eps_x + a * (hi.eps_x - lo.eps_x), lo.eps_y + a * (hi.eps_y - lo.eps_y)};
  };

  SimulationRecord record;
  record.basis = basis;
  record.duration = T;
  record.dt = dt;
  record.has_designated = reference != nullptr;
  record.fields.reserve(static_cast<std::size_t>(n_steps) + 1);

  ComplexVector psi = state0.coeffs();
  DeviationTracker dev;
  try {
    for (long k = 0; k <= n_steps; ++k) {
      const double t = k == n_steps ? T : static_cast<double>(k) * dt;
      const OrientationMoments m = orientation_moments(psi, *ops);
      TrackPoint target;
      if (reference != nullptr) {
        target = reference->value(t);
        dev.add(m.cx - target.x, m.sy - target.y);
      }
      FieldSample field;
      if (k == n_steps) {
        field = held(t);
      } else if (interpolation == FieldInterpolation::kHold) {
        field = held(t);
      } else {
        field = interpolated(t + 0.5 * dt);
      }
      field.t = t;

      record.fields.push_back(field);
      if (k % stride == 0 || k == n_steps) record.samples.push_back(make_sample(t, field, m, target.x, target.y, psi));
      if (k == n_steps) break;

      prop.advance(psi, field.eps_x, field.eps_y, dt);
      if (!psi.allFinite()) throw NonFinite("state after step at t=" + std::to_string(t));
      check_leakage(psi, t + dt, params, basis.cutoff());
    }
  } catch (BasisLeakage& e) {
    rethrow_with_record(e, record, dev);
  }
  dev.store(record);
  return record;
}

std::vector<FieldSample> filter_fields(std::span<const FieldSample> series, double cutoff) {
  std::vector<double> t(series.size()), ex(series.size()), ey(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    t[i] = series[i].t;
    ex[i] = series[i].eps_x;
    ey[i] = series[i].eps_y;
  }
  const std::vector<double> fx = lowpass_filter(t, ex, cutoff);
  const std::vector<double> fy = lowpass_filter(t, ey, cutoff);
  std::vector<FieldSample> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = {t[i], fx[i], fy[i]};
  return out;
}

}  // namespace rotortrack

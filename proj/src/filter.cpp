#include "rotortrack/filter.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include "rotortrack/errors.hpp"

namespace rotortrack {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

}  // namespace

double uniform_spacing(std::span<const double> times, double rel_tol) {
  if (times.size() < 2) throw NonUniformSampling("need at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NonUniformSampling("times must be strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > rel_tol * dt) {
      throw NonUniformSampling("spacing at sample " + std::to_string(i) + " is " + std::to_string(step) +
                               ", expected " + std::to_string(dt));
    }
  }
  return dt;
}

std::vector<double> lowpass_filter(std::span<const double> values, double dt, double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InvalidArgument("filter cutoff must be positive");
  if (!(dt > 0.0)) throw NonUniformSampling("sample spacing must be positive");
  const std::size_t n = values.size();
  if (n < 2) return {values.begin(), values.end()};

  std::vector<double> signal(values.begin(), values.end());
  const std::size_t bins = n / 2 + 1;
  std::vector<std::complex<double>> spectrum(bins);
  auto* freq = reinterpret_cast<fftw_complex*>(spectrum.data());

  Plan forward, backward;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward.handle = fftw_plan_dft_r2c_1d(static_cast<int>(n), signal.data(), freq, FFTW_ESTIMATE);
    backward.handle = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq, signal.data(), FFTW_ESTIMATE);
  }
  fftw_execute(forward.handle);

  const double df = 1.0 / (static_cast<double>(n) * dt);
  for (std::size_t k = 1; k < bins; ++k) {
    if (static_cast<double>(k) * df > cutoff) spectrum[k] = 0.0;
  }
  fftw_execute(backward.handle);  // destroys spectrum, fine

  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : signal) v *= scale;
  return signal;
}

std::vector<double> lowpass_filter(std::span<const double> times, std::span<const double> values, double cutoff) {
  if (times.size() != values.size()) throw NonUniformSampling("times and values differ in length");
  return lowpass_filter(values, uniform_spacing(times), cutoff);
}

}  // namespace rotortrack

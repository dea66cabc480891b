#pragma once

#include <span>
#include <vector>

namespace rotortrack {

/// Spectral low-pass: forward real FFT, zero every bin whose frequency
/// (cycles per unit time) exceeds `cutoff`, inverse FFT. Output has the input's
/// length and mean. Idempotent.
std::vector<double> lowpass_filter(std::span<const double> values, double dt, double cutoff);

/// Same, after checking that `times` is uniformly spaced (relative 1e-6).
/// Throws NonUniformSampling otherwise.
std::vector<double> lowpass_filter(std::span<const double> times, std::span<const double> values, double cutoff);

/// Returns the common spacing of `times`, or throws NonUniformSampling.
double uniform_spacing(std::span<const double> times, double rel_tol = 1e-6);

}  // namespace rotortrack

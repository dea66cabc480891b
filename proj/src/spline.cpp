#include "rotortrack/spline.hpp"

#include <algorithm>
#include <cmath>

#include "rotortrack/errors.hpp"

namespace rotortrack {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n != values_.size()) throw InvalidArgument("spline knots and values differ in length");
  if (n < 2) throw InvalidArgument("spline needs at least two knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw InvalidArgument("spline knots must be strictly increasing");
  }

  moments_.assign(n, 0.0);
  if (n == 2) return;

  // Tridiagonal system for the interior second derivatives, natural ends.
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double h0 = knots_[i] - knots_[i - 1];
    const double h1 = knots_[i + 1] - knots_[i];
    diag[k] = 2.0 * (h0 + h1);
    upper[k] = h1;
    rhs[k] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
  }
  // Thomas algorithm; lower[k] == upper[k-1] by symmetry.
  for (std::size_t k = 1; k < m; ++k) {
    const double w = upper[k - 1] / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  moments_[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) {
    moments_[k + 1] = (rhs[k] - upper[k] * moments_[k + 2]) / diag[k];
  }
}

std::size_t CubicSpline::segment(double x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double CubicSpline::value(double x) const {
  const std::size_t i = segment(x);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - x) / h;
  const double b = (x - knots_[i]) / h;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * moments_[i] + (b * b * b - b) * moments_[i + 1]) * h * h / 6.0;
}

double CubicSpline::first_derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - x) / h;
  const double b = (x - knots_[i]) / h;
  return (values_[i + 1] - values_[i]) / h - (3.0 * a * a - 1.0) * h * moments_[i] / 6.0 +
         (3.0 * b * b - 1.0) * h * moments_[i + 1] / 6.0;
}

double CubicSpline::second_derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - x) / h;
  const double b = (x - knots_[i]) / h;
  return a * moments_[i] + b * moments_[i + 1];
}

}  // namespace rotortrack

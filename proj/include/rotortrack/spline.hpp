#pragma once

#include <span>
#include <vector>

namespace rotortrack {

/// Natural cubic spline through (knots[i], values[i]); knots strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  double value(double x) const;
  double first_derivative(double x) const;
  double second_derivative(double x) const;

  const std::vector<double>& knots() const { return knots_; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

 private:
  std::size_t segment(double x) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> moments_;  // second derivatives at the knots
};

}  // namespace rotortrack

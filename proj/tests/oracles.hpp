#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's operator builders or propagator.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// <m|f(phi)|m'> = (1/2pi) int exp(-i m phi) f(phi) exp(i m' phi) dphi by the
// trapezoid rule, exact for trigonometric polynomials of degree < grid.
inline Matrix multiplication_operator(int big_m, const std::function<Complex(double)>& f, int grid = 512) {
  const int dim = 2 * big_m + 1;
  Matrix out = Matrix::Zero(dim, dim);
  for (int k = 0; k < grid; ++k) {
    const double phi = 2.0 * kPi * k / grid;
    const Complex fv = f(phi) / static_cast<double>(grid);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const int m = a - big_m;
        const int mp = b - big_m;
        out(a, b) += std::polar(1.0, static_cast<double>(mp - m) * phi) * fv;
      }
    }
  }
  return out;
}

inline Matrix cos_matrix(int big_m) {
  return multiplication_operator(big_m, [](double p) { return Complex(std::cos(p), 0.0); });
}
inline Matrix sin_matrix(int big_m) {
  return multiplication_operator(big_m, [](double p) { return Complex(std::sin(p), 0.0); });
}

// H0 = -d^2/dphi^2 acting on exp(i m phi)/sqrt(2 pi).
inline Matrix h0_matrix(int big_m) {
  const int dim = 2 * big_m + 1;
  Matrix out = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) out(i, i) = static_cast<double>((i - big_m) * (i - big_m));
  return out;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// [H,[H,O]] written out as explicit products.
inline Matrix double_commutator(const Matrix& h, const Matrix& o) {
  return h * (h * o) - h * (o * h) - (h * o) * h + (o * h) * h;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix expm_propagator(const Matrix& h, double dt) {
  const Matrix a = Complex(0.0, -dt) * h;
  return a.exp();
}

inline Matrix field_hamiltonian(int big_m, double ex, double ey) {
  return h0_matrix(big_m) - ex * cos_matrix(big_m) - ey * sin_matrix(big_m);
}

// Random normalized state supported on |m| <= support.
inline Vector random_state(int big_m, std::mt19937_64& rng, int support) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v = Vector::Zero(2 * big_m + 1);
  for (int m = -support; m <= support; ++m) v[m + big_m] = Complex(n(rng), n(rng));
  return v / v.norm();
}

// int |psi(phi)|^2 f(phi) dphi with psi(phi) = sum_m c_m exp(i m phi)/sqrt(2 pi).
inline double grid_expectation(const Vector& c, const std::function<double(double)>& f, int grid = 512) {
  const int big_m = static_cast<int>(c.size() - 1) / 2;
  double acc = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double phi = 2.0 * kPi * k / grid;
    Complex psi = 0.0;
    for (int m = -big_m; m <= big_m; ++m) psi += c[m + big_m] * std::polar(1.0, m * phi);
    acc += std::norm(psi) * f(phi);
  }
  return acc / grid;
}

inline std::vector<Complex> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * std::polar(1.0, -2.0 * kPi * double(k * j % n) / double(n));
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> naive_idft_real(const std::vector<Complex>& spec) {
  const std::size_t n = spec.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += spec[k] * std::polar(1.0, 2.0 * kPi * double(k * j % n) / double(n));
    out[j] = acc.real() / double(n);
  }
  return out;
}

// Central five-point second derivative of g at t.
inline double fd2(const std::function<double(double)>& g, double t, double h) {
  return (-g(t + 2 * h) + 16 * g(t + h) - 30 * g(t) + 16 * g(t - h) - g(t - 2 * h)) / (12 * h * h);
}

}  // namespace oracle

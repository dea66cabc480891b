#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rotortrack/errors.hpp"
#include "rotortrack/rotor.hpp"

using namespace rotortrack;

TEST_CASE("basis dimensions and m values") {
  CHECK(build_basis(1).dim() == 3);
  CHECK(build_basis(1).m_values() == std::vector<int>{-1, 0, 1});
  CHECK(build_basis(10).dim() == 21);
  CHECK_THROWS_AS(build_basis(0), InvalidArgument);
  CHECK_THROWS_AS(build_basis(-3), InvalidArgument);

  const BasisSpec b(7);
  const auto ms = b.m_values();
  for (std::size_t i = 1; i < ms.size(); ++i) CHECK(ms[i] > ms[i - 1]);
  CHECK(b.index_of(0) == 7);
  CHECK(b.m_at(0) == -7);
}

TEST_CASE("cos_op for M=1") {
  const ComplexMatrix c = cos_op(BasisSpec(1)).matrix();
  Eigen::Matrix3cd expected;
  expected << 0, 0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0;
  CHECK((c - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cos_op and sin_op match phi-space quadrature") {
  for (int big_m : {1, 2, 5, 12}) {
    const BasisSpec b(big_m);
    CHECK(oracle::max_abs(cos_op(b).matrix() - oracle::cos_matrix(big_m)) < 1e-14);
    CHECK(oracle::max_abs(sin_op(b).matrix() - oracle::sin_matrix(big_m)) < 1e-14);
    CHECK(cos_op(b).matrix().diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sin_op elements between |0> and |1>") {
  const BasisSpec b(1);
  const ComplexMatrix s = sin_op(b).matrix();
  CHECK(s(b.index_of(0), b.index_of(1)) == Complex(0.0, 0.5));
  CHECK(s(b.index_of(1), b.index_of(0)) == Complex(0.0, -0.5));
  CHECK(hermiticity_defect(s) == 0.0);
}

TEST_CASE("cos^2 + sin^2 is the identity on the interior") {
  for (int big_m : {2, 3, 8, 20}) {
    const BasisSpec b(big_m);
    const ComplexMatrix c = cos_op(b).matrix();
    const ComplexMatrix s = sin_op(b).matrix();
    const ComplexMatrix sum = c * c + s * s;
    const int n = b.dim();
    const ComplexMatrix interior = sum.block(1, 1, n - 2, n - 2);
    CHECK(oracle::max_abs(interior - ComplexMatrix::Identity(n - 2, n - 2)) == 0.0);
    // edge rows are truncated
    CHECK(std::abs(sum(0, 0) - 1.0) > 0.1);
  }
  const BasisSpec b2(2);
  const ComplexMatrix c = cos_op(b2).matrix();
  CHECK(std::abs((c * c)(b2.index_of(0), b2.index_of(0)) - 0.5) < 1e-15);
}

TEST_CASE("kinetic_op is diag(m^2)") {
  const BasisSpec b(3);
  const ComplexMatrix k = kinetic_op(b).matrix();
  CHECK(k(b.index_of(0), b.index_of(0)) == 0.0);
  CHECK(k(b.index_of(3), b.index_of(3)) == 9.0);
  CHECK(k(b.index_of(-3), b.index_of(-3)) == 9.0);
  CHECK(kinetic_op(BasisSpec(1)).matrix().trace() == Complex(2.0, 0.0));
  CHECK(oracle::max_abs(k - oracle::h0_matrix(3)) == 0.0);
}

TEST_CASE("accel_ops equal the explicit double commutators") {
  for (int big_m = 1; big_m <= 8; ++big_m) {
    const BasisSpec b(big_m);
    const auto [ax, ay] = accel_ops(b);
    const oracle::Matrix h0 = oracle::h0_matrix(big_m);
    CHECK(oracle::max_abs(ax.matrix() - oracle::double_commutator(h0, oracle::cos_matrix(big_m))) < 1e-12);
    CHECK(oracle::max_abs(ay.matrix() - oracle::double_commutator(h0, oracle::sin_matrix(big_m))) < 1e-12);
  }
}

TEST_CASE("accel_ops annihilate the ground-state expectation") {
  const BasisSpec b(4);
  const auto [ax, ay] = accel_ops(b);
  const RotorState g = RotorState::basis_state(b, 0);
  CHECK(std::abs(expectation(g, ax)) < 1e-15);
  CHECK(std::abs(expectation(g, ay)) < 1e-15);
}

TEST_CASE("flagged operators are Hermitian up to M=64") {
  for (int big_m : {1, 2, 7, 16, 33, 64}) {
    const RotorOperators ops(BasisSpec{big_m});
    for (const AngularOperator* op :
         {&ops.cos, &ops.sin, &ops.kinetic, &ops.accel_x, &ops.accel_y, &ops.velocity_x, &ops.velocity_y}) {
      CHECK(op->hermitian());
      CHECK(hermiticity_defect(op->matrix()) < 1e-12);
    }
  }
}

TEST_CASE("AngularOperator rejects a non-Hermitian matrix flagged Hermitian") {
  const BasisSpec b(1);
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(AngularOperator(b, m, true), InvalidArgument);
  CHECK_NOTHROW(AngularOperator(b, m, false));
  CHECK_THROWS_AS(AngularOperator(b, ComplexMatrix::Zero(2, 2), false), InvalidArgument);
}

TEST_CASE("expectation values of small states") {
  const BasisSpec b(1);
  CHECK(std::abs(expectation(RotorState::basis_state(b, 0), cos_op(b))) == 0.0);

  ComplexVector v(3);
  v << 1, 1, 1;
  const RotorState s = RotorState::normalized(b, v);
  CHECK(expectation_real(s, cos_op(b)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(expectation_real(s, sin_op(b))) < 1e-15);
}

TEST_CASE("expectation of Hermitian operators is real and matches the phi grid") {
  std::mt19937_64 rng(7);
  const int big_m = 6;
  const BasisSpec b(big_m);
  const auto ops = operators_for(b);
  for (int k = 0; k < 200; ++k) {
    const RotorState s(b, oracle::random_state(big_m, rng, big_m));
    for (const AngularOperator* op : {&ops->cos, &ops->sin, &ops->kinetic, &ops->accel_x, &ops->accel_y}) {
      CHECK(std::abs(expectation(s, *op).imag()) < 1e-12);
    }
    const double c = oracle::grid_expectation(s.coeffs(), [](double p) { return std::cos(p); });
    CHECK(std::abs(expectation_real(s, ops->cos) - c) < 1e-13);
  }
}

TEST_CASE("expectation rejects mismatched bases") {
  const RotorState s = RotorState::basis_state(BasisSpec(2), 0);
  CHECK_THROWS_AS(expectation(s, cos_op(BasisSpec(3))), BasisMismatch);
  CHECK_THROWS_AS(expectation_real(s, AngularOperator(BasisSpec(2), ComplexMatrix::Zero(5, 5), false)),
                  InvalidArgument);
}

TEST_CASE("RotorState validation") {
  const BasisSpec b(2);
  CHECK_THROWS_AS(RotorState(b, ComplexVector::Zero(5)), InvalidArgument);
  CHECK_THROWS_AS(RotorState(b, ComplexVector::Ones(4) / 2.0), InvalidArgument);
  ComplexVector nan = ComplexVector::Zero(5);
  nan[0] = std::nan("");
  CHECK_THROWS_AS(RotorState(b, nan), NonFinite);
  CHECK_THROWS_AS(RotorState::basis_state(b, 3), InvalidArgument);

  ComplexVector edge = ComplexVector::Zero(5);
  edge[0] = edge[4] = std::sqrt(0.5);
  CHECK(RotorState(b, edge).edge_population() == doctest::Approx(1.0));
}

TEST_CASE("operators_for caches per basis") {
  const auto a = operators_for(BasisSpec(5));
  const auto b = operators_for(BasisSpec(5));
  CHECK(a.get() == b.get());
  CHECK(operators_for(BasisSpec(6)).get() != a.get());
  // velocity operators are i[H0, O]
  const oracle::Matrix h0 = oracle::h0_matrix(5);
  CHECK(oracle::max_abs(a->velocity_x.matrix() - Complex(0, 1) * oracle::commutator(h0, oracle::cos_matrix(5))) <
        1e-14);
}

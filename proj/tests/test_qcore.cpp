#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "w3cert/qcore.hpp"

using namespace w3cert;

TEST_SUITE("qcore") {
  TEST_CASE("basis ordering puts party A first") {
    const auto s = basis_state("100");
    CHECK(std::abs(s[4] - Complex(1.0)) < 1e-15);
    const auto w = w3_state();
    for (int i : {1, 2, 4}) CHECK(std::abs(w[i] - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(w[0]) == 0.0);
    CHECK_THROWS_AS(basis_state("10a"), std::invalid_argument);
  }

  TEST_CASE("kron matches the reference product") {
    std::mt19937_64 rng(3);
    const auto a = oracle::random_dichotomic(rng, 2, 1);
    const auto b = oracle::random_dichotomic(rng, 3, 1);
    CHECK((kron(a, b) - oracle::kron2(a, b)).norm() < 1e-14);
    CHECK((kron_all({a, b, a}) - oracle::kron_list({a, b, a})).norm() < 1e-14);
  }

  TEST_CASE("pauli algebra") {
    CHECK(is_dichotomic(pauli_x()));
    CHECK(is_dichotomic(pauli_z()));
    CHECK((pauli_x() * pauli_z() + pauli_z() * pauli_x()).norm() < 1e-15);
    CHECK((pauli_x() * pauli_y() - Complex(0, 1) * pauli_z()).norm() < 1e-15);
    CHECK_FALSE(is_dichotomic(2.0 * pauli_x()));
  }

  TEST_CASE("state vectors normalize and reject zero") {
    ComplexVector v(2);
    v << 3.0, 4.0;
    StateVector s(v);
    CHECK(std::abs(s.amplitudes().norm() - 1.0) < 1e-15);
    CHECK_THROWS_AS(StateVector(ComplexVector::Zero(2)), std::invalid_argument);
  }

  TEST_CASE("expectations") {
    const auto w = w3_state();
    const auto zzz = kron_all({pauli_z(), pauli_z(), pauli_z()});
    CHECK(std::abs(expect(zzz, w) - Complex(-1.0)) < 1e-14);
    CHECK_THROWS_AS(expect(pauli_z(), w), std::invalid_argument);
    const auto rho = depolarize(w, 0.5);
    CHECK(std::abs(expect(zzz, rho) - Complex(-0.5)) < 1e-14);
  }

  TEST_CASE("density operator validation") {
    CHECK_THROWS_AS(DensityOperator{ComplexMatrix::Identity(2, 2)}, std::invalid_argument);
    ComplexMatrix bad(2, 2);
    bad << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(DensityOperator{bad}, std::invalid_argument);
    CHECK_THROWS_AS(depolarize(w3_state(), 1.5), std::invalid_argument);
  }

  TEST_CASE("purification reproduces the density operator") {
    const auto rho = depolarize(w3_state(), 0.9);
    const auto w = purification(rho);
    CHECK(w.cols() == 8);
    CHECK((w * w.adjoint() - rho.matrix()).norm() < 1e-13);
    const auto pure = purification(DensityOperator::pure(w3_state()));
    CHECK(pure.cols() == 1);
  }

  TEST_CASE("hermitian eigendecomposition") {
    std::mt19937_64 rng(5);
    const auto o = oracle::random_dichotomic(rng, 4, 1);
    const auto e = hermitian_eig(o);
    CHECK(std::abs(e.values(0) + 1.0) < 1e-12);
    CHECK(std::abs(e.values(3) - 1.0) < 1e-12);
    CHECK((e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - o).norm() < 1e-12);
    ComplexMatrix nh(2, 2);
    nh << 0, 1, 0, 0;
    CHECK_THROWS_AS(hermitian_eig(nh), std::invalid_argument);
  }

  TEST_CASE("psi_gamma") {
    const auto p = psi_gamma(2.0);
    CHECK(std::abs(p[1] - 2.0 / std::sqrt(6.0)) < 1e-15);
    CHECK(std::abs(p[4] - 1.0 / std::sqrt(6.0)) < 1e-15);
    CHECK_THROWS_AS(psi_gamma(0.0), std::invalid_argument);
  }
}

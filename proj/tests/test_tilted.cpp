#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "w3cert/extraction.hpp"
#include "w3cert/tilted.hpp"

using namespace w3cert;

namespace {

const std::array<double, 4> kGammas = {0.25, 0.5, 1.0, 2.0};

// Random qubit observable anywhere on the Bloch sphere.
oracle::M bloch(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d n(g(rng), g(rng), g(rng));
  n.normalize();
  oracle::M sy(2, 2);
  sy << 0, oracle::C(0, -1), oracle::C(0, 1), 0;
  return n(0) * oracle::sx() + n(1) * sy + n(2) * oracle::sz();
}

oracle::M bell(double alpha, const oracle::M& a0, const oracle::M& a1, const oracle::M& b0, const oracle::M& b1) {
  const oracle::M i = oracle::M::Identity(2, 2);
  return alpha * oracle::kron2(a0, i) + oracle::kron2(a0, b0 + b1) + oracle::kron2(a1, b0 - b1);
}

struct Projectors {
  ComplexMatrix pa0, pa1, pb0, pb1, pc0, pc1, xa, xb, xc;
};

Projectors view_projectors(const Realization& v) {
  const auto id = identity(v.system_dimension());
  auto p = [&](Party q, int o) {
    return ComplexMatrix(0.5 * (id + (o == 0 ? 1.0 : -1.0) * v.embedded(q, "Z")));
  };
  return {p(Party::A, 0), p(Party::A, 1), p(Party::B, 0), p(Party::B, 1), p(Party::C, 0), p(Party::C, 1),
          v.embedded(Party::A, "X"), v.embedded(Party::B, "X"), v.embedded(Party::C, "X")};
}

}  // namespace

TEST_SUITE("tilted") {
  TEST_CASE("parameter invariants") {
    for (double g : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, -0.5}) {
      const auto p = tilted_params(g);
      CHECK(std::abs(p.beta_star - std::sqrt(8.0 + 2.0 * p.alpha * p.alpha)) < 1e-12);
      CHECK(std::abs(std::tan(p.mu) - 2.0 * g / (1.0 + g * g)) < 1e-12);
      CHECK(p.beta_star >= 2.0 + p.alpha - 1e-12);
    }
    CHECK(alpha_of_gamma(1.0) == 0.0);
    CHECK(std::abs(tilted_params(1.0).mu - std::numbers::pi / 4) < 1e-15);
    CHECK(alpha_of_gamma(1e-6) == doctest::Approx(2.0).epsilon(1e-9));
    const auto tiny = tilted_params(1e-6);
    CHECK(tiny.beta_star - (2.0 + tiny.alpha) < 1e-9);
    CHECK(tilted_params(0.5).beta_star - (2.0 + tilted_params(0.5).alpha) > 0.1);
    CHECK_THROWS_AS(alpha_of_gamma(0.0), std::invalid_argument);
    // The other closed form for alpha diverges where the state is maximally entangled.
    CHECK(std::abs(alpha_alternative(0.999)) > 100.0);
  }

  TEST_CASE("settings are dichotomic and give 2 sqrt2 at gamma = 1") {
    for (double g : kGammas) {
      for (const auto& party : tilted_settings(g)) {
        for (const auto& [label, op] : party) CHECK(is_dichotomic(op, 1e-12));
      }
    }
    const auto s = tilted_settings(1.0);
    // Conditional state of B and C given P_A^0: (|10> + |01>)/sqrt2.
    oracle::V phi = oracle::V::Zero(4);
    phi(1) = phi(2) = 1.0 / std::sqrt(2.0);
    const auto op = tilted_bell_operator(0.0, s[1].at("0"), s[1].at("1"), s[2].at("0"), s[2].at("1"));
    CHECK(std::abs((phi.adjoint() * op * phi)(0, 0).real() - 2.0 * std::sqrt(2.0)) < 1e-12);
  }

  TEST_CASE("Bell oracle finds the quantum maximum") {
    for (double g : kGammas) {
      const auto p = tilted_params(g);
      const auto m = tilted_bell_max(p.alpha);
      CHECK(std::abs(m.value - p.beta_star) < 1e-6);
      const oracle::M a1 = std::cos(m.angles[0]) * oracle::sz() + std::sin(m.angles[0]) * oracle::sx();
      const oracle::M b0 = std::cos(m.angles[1]) * oracle::sz() + std::sin(m.angles[1]) * oracle::sx();
      const oracle::M b1 = std::cos(m.angles[2]) * oracle::sz() + std::sin(m.angles[2]) * oracle::sx();
      Eigen::SelfAdjointEigenSolver<oracle::M> es(bell(p.alpha, oracle::sz(), a1, b0, b1));
      CHECK(std::abs(es.eigenvalues()(3) - m.value) < 1e-12);
    }
  }

  TEST_CASE("random strategies never beat sqrt(8 + 2 alpha^2)") {
    std::mt19937_64 rng(77);
    for (double g : kGammas) {
      const auto p = tilted_params(g);
      double best = -1e9;
      for (int i = 0; i < 4000; ++i) {
        Eigen::SelfAdjointEigenSolver<oracle::M> es(bell(p.alpha, bloch(rng), bloch(rng), bloch(rng), bloch(rng)));
        best = std::max(best, es.eigenvalues()(3));
      }
      CHECK(best <= p.beta_star + 1e-12);
      CHECK(best >= 2.0 + std::abs(p.alpha) - 0.2);
    }
  }

  TEST_CASE("conditional statistics") {
    for (double g : kGammas) {
      const auto p = tilted_params(g);
      const auto s = conditional_statistics(family_realization(g), p.alpha);
      const double n = 2.0 + g * g;
      CHECK(std::abs(s.p10 - 1.0 / n) < 1e-12);
      CHECK(std::abs(s.p01 - 1.0 / n) < 1e-12);
      CHECK(std::abs(s.p00 - g * g / n) < 1e-12);
      CHECK(std::abs(s.bell_a - p.beta_star * (1.0 + g * g) / n) < 1e-12);
      CHECK(std::abs(s.bell_b - p.beta_star * (1.0 + g * g) / n) < 1e-12);
      const auto i = ideal_conditional_statistics(g);
      CHECK(std::abs(i.bell_a - s.bell_a) < 1e-12);
    }
  }

  TEST_CASE("extraction") {
    for (double g : kGammas) CHECK(std::abs(family_extraction(family_realization(g), g) - 1.0) < 1e-9);

    for (double g : {0.5, 2.0}) {
      const oracle::V psi = psi_gamma(g).amplitudes();
      const oracle::M rho = oracle::depolarized(psi, 0.95);
      const auto r = family_realization(g, DensityOperator(rho));
      const auto v = isometry_view(r, g);
      std::array<oracle::M, 3> z, x;
      for (int q = 0; q < 3; ++q) {
        z[q] = v.local(static_cast<Party>(q), "Z");
        x[q] = v.local(static_cast<Party>(q), "X");
      }
      const oracle::M anc = oracle::ancilla_state(rho, z, x);
      const double ref = (psi.adjoint() * anc * psi)(0, 0).real();
      const double f = family_extraction(r, g);
      CHECK(f < 1.0);
      CHECK(std::abs(f - ref) < 1e-10);
    }
  }

  TEST_CASE("isometry view rejects non-dichotomic combinations") {
    const auto r = family_realization(1.0);
    CHECK_THROWS_AS(isometry_view(r, 0.5), std::invalid_argument);
  }

  TEST_CASE("conditional relations on the ideal family") {
    for (double g : kGammas) {
      const auto v = isometry_view(family_realization(g), g);
      const auto psi = v.branches();
      const auto p = view_projectors(v);
      CHECK((p.pa0 * p.pc1 * psi - p.pa0 * p.pb0 * psi).norm() < 1e-10);
      CHECK((p.pa0 * p.pc0 * psi - p.pa0 * p.pb1 * psi).norm() < 1e-10);
      CHECK((p.pa0 * p.xc * p.pc1 * psi / g - p.pa0 * p.xb * p.pb1 * psi).norm() < 1e-10);
      CHECK((p.pb0 * p.pc1 * psi - p.pb0 * p.pa0 * psi).norm() < 1e-10);
      CHECK((p.pb0 * p.pc0 * psi - p.pb0 * p.pa1 * psi).norm() < 1e-10);
      CHECK((p.pb0 * p.xc * p.pc1 * psi / g - p.pb0 * p.xa * p.pa1 * psi).norm() < 1e-10);
      CHECK((p.pa1 * p.pb1 * psi).norm() < 1e-10);
      // With P_C^0 in place of P_C^1 the relation does not hold.
      CHECK((p.pa0 * p.xc * p.pc0 * psi / g - p.pa0 * p.xb * p.pb1 * psi).norm() > 0.1);
    }
  }

  TEST_CASE("gamma = 1 reproduces the W-state table") {
    const auto v = isometry_view(family_realization(1.0), 1.0);
    const auto t = statistics(v);
    const auto ideal = ideal_statistics();
    for (std::size_t i = 0; i < kCorrelatorCount; ++i) CHECK(std::abs(t.correlators[i] - ideal.correlators[i]) < 1e-12);
    for (std::size_t i = 0; i < kTripleCount; ++i) CHECK(std::abs(t.triples[i] - ideal.triples[i]) < 1e-12);
  }
}

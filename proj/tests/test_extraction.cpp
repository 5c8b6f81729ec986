#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "w3cert/extraction.hpp"
#include "w3cert/moments.hpp"

using namespace w3cert;

namespace {

struct QubitModel {
  std::array<oracle::M, 3> z, x;
  std::array<PartySettings, 3> settings;
};

QubitModel pauli_model() {
  QubitModel m;
  for (int p = 0; p < 3; ++p) {
    m.z[p] = oracle::sz();
    m.x[p] = oracle::sx();
    m.settings[p]["Z"] = m.z[p];
    m.settings[p]["X"] = m.x[p];
  }
  m.settings[2]["D"] = (oracle::sx() + oracle::sz()) / std::sqrt(2.0);
  return m;
}

QubitModel random_model(std::mt19937_64& rng) {
  QubitModel m;
  for (int p = 0; p < 3; ++p) {
    m.z[p] = oracle::random_dichotomic(rng, 2, 1);
    m.x[p] = oracle::random_dichotomic(rng, 2, 1);
    m.settings[p]["Z"] = m.z[p];
    m.settings[p]["X"] = m.x[p];
  }
  m.settings[2]["D"] = oracle::random_dichotomic(rng, 2, 1);
  return m;
}

ComplexMatrix embedded_op(const Realization& r, Party p, const char* label) { return r.embedded(p, label); }

}  // namespace

TEST_SUITE("extraction") {
  TEST_CASE("ideal components") {
    const auto out = isometry_output(ideal_w3_realization());
    for (int abc : {0, 3, 5, 6, 7}) CHECK(out.components[abc].norm() < 1e-12);
    for (int abc : {1, 2, 4}) CHECK(std::abs(out.components[abc].squaredNorm() - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(out.norm_squared() - 1.0) < 1e-12);
  }

  TEST_CASE("ancilla state matches the dense circuit") {
    const auto m = pauli_model();
    const auto anc = extracted_ancilla_state(Realization({2, 2, 2}, w3_state(), m.settings));
    const oracle::V w = oracle::w3();
    CHECK((anc.matrix() - w * w.adjoint()).norm() < 1e-12);

    // Maximally mixed input.
    const Realization mixed({2, 2, 2}, depolarize(w3_state(), 0.0), m.settings);
    const oracle::M ref = oracle::ancilla_state(oracle::M::Identity(8, 8) / 8.0, m.z, m.x);
    CHECK((extracted_ancilla_state(mixed).matrix() - ref).norm() < 1e-12);
    CHECK(std::abs(swap_fidelity(mixed, w3_state()) - (w.adjoint() * ref * w)(0, 0).real()) < 1e-12);

    const auto zero = extracted_ancilla_state(Realization({2, 2, 2}, basis_state("000"), m.settings));
    CHECK(std::abs(zero.matrix()(0, 0) - Complex(1.0)) < 1e-12);
  }

  TEST_CASE("random qubit models against the dense circuit") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
      const auto m = random_model(rng);
      const oracle::V psi = oracle::random_state(rng, 8);
      const double v = 0.7 + 0.05 * trial;
      const oracle::M rho = oracle::depolarized(psi, v);
      const Realization r({2, 2, 2}, DensityOperator(rho), m.settings);
      const oracle::M ref = oracle::ancilla_state(rho, m.z, m.x);
      CHECK((extracted_ancilla_state(r).matrix() - ref).norm() < 1e-11);
      const oracle::V w = oracle::w3();
      CHECK(std::abs(swap_fidelity(r, w3_state()) - (w.adjoint() * ref * w)(0, 0).real()) < 1e-11);
      CHECK(std::abs(norm_distance(r) - oracle::junk_residual(rho, m.z, m.x)) < 1e-10);
    }
  }

  TEST_CASE("junk decomposition and norm distance") {
    CHECK(norm_distance(ideal_w3_realization()) < 1e-10);
    const auto jd = junk_decomposition(isometry_output(ideal_w3_realization()));
    CHECK(std::abs(jd.junk_norm - 1.0 / std::sqrt(3.0)) < 1e-12);
    CHECK_FALSE(jd.degenerate);

    const auto zero = qubit_w3_realization(basis_state("000"));
    const auto jz = junk_decomposition(isometry_output(zero));
    CHECK(jz.degenerate);
    CHECK(std::abs(jz.residual - std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(swap_fidelity(zero, w3_state())) < 1e-14);

    const auto m = pauli_model();
    for (double v : {0.9, 0.99}) {
      const oracle::M rho = oracle::depolarized(oracle::w3(), v);
      CHECK(std::abs(norm_distance(qubit_w3_realization(depolarize(w3_state(), v))) -
                     oracle::junk_residual(rho, m.z, m.x)) < 1e-10);
    }
  }

  TEST_CASE("fidelity one iff norm distance zero") {
    std::mt19937_64 rng(8);
    const auto m = random_model(rng);
    const std::vector<Realization> corpus = {
        ideal_w3_realization(), qubit_w3_realization(depolarize(w3_state(), 0.999)),
        Realization({2, 2, 2}, w3_state(), m.settings), qubit_w3_realization(basis_state("001"))};
    for (const auto& r : corpus) {
      const bool f1 = std::abs(swap_fidelity(r, w3_state()) - 1.0) < 1e-9;
      const bool d0 = norm_distance(r) < 1e-9;
      CHECK(f1 == d0);
    }
    CHECK(std::abs(swap_fidelity(corpus[0], w3_state()) - 1.0) < 1e-10);
  }

  TEST_CASE("optimal norm distance formula") {
    const auto r = qubit_w3_realization(depolarize(w3_state(), 0.95));
    const auto out = isometry_output(r);
    const double f = swap_fidelity(out, w3_state());
    CHECK(std::abs(optimal_norm_distance(out, w3_state()) - std::sqrt(2.0 - 2.0 * std::sqrt(f))) < 1e-12);
    CHECK(optimal_norm_distance(out, w3_state()) <= norm_distance(r) + 1e-12);
  }

  TEST_CASE("fidelity equals its moment expansion") {
    const MomentMatrixTemplate t(preset_words(Preset::Level2));
    const auto obj = fidelity_objective(t);
    for (double v : {0.99, 0.9}) {
      const auto r = qubit_w3_realization(depolarize(w3_state(), v));
      const auto y = exact_moments(t, r);
      CHECK(std::abs(obj.evaluate(y) - swap_fidelity(r, w3_state())) < 1e-10);
    }
  }

  TEST_CASE("proof identities on the ideal realization") {
    const auto r = ideal_w3_realization();
    const auto psi = r.branches();
    const auto id = identity(8);
    for (Party cond : {Party::A, Party::B}) {
      const Party other = cond == Party::A ? Party::B : Party::A;
      const ComplexMatrix p0 = 0.5 * (id + embedded_op(r, cond, "Z"));
      const auto xo = embedded_op(r, other, "X");
      const auto zo = embedded_op(r, other, "Z");
      const auto xc = embedded_op(r, Party::C, "X");
      const auto zc = embedded_op(r, Party::C, "Z");
      const auto dc = embedded_op(r, Party::C, "D");
      CHECK((p0 * xo * psi - p0 * xc * psi).norm() < 1e-12);
      CHECK((p0 * zo * psi + p0 * zc * psi).norm() < 1e-12);
      CHECK(std::abs((psi.adjoint() * xo * p0 * zo * psi)(0, 0)) < 1e-12);
      CHECK((p0 * dc * psi - (p0 * xo - p0 * zo) * psi / std::sqrt(2.0)).norm() < 1e-12);
      CHECK((p0 * (xo * zo + zo * xo) * psi).norm() < 1e-12);
      CHECK((p0 * (xc * zc + zc * xc) * psi).norm() < 1e-12);
    }
  }

  TEST_CASE("operators in front of the isometry act as Paulis on the ancillas") {
    const auto r = ideal_w3_realization();
    const auto jd = junk_decomposition(isometry_output(r));
    for (Party p : {Party::A, Party::B, Party::C}) {
      for (const char* label : {"X", "Z"}) {
        const auto out = isometry_output(r, r.embedded(p, label));
        std::vector<ComplexMatrix> f(3, identity(2));
        f[static_cast<int>(p)] = label[0] == 'X' ? pauli_x() : pauli_z();
        const ComplexVector target = kron_all(f) * w3_state().amplitudes();
        // Psi' = sum_abc component_abc (x) |abc>; compare with junk (x) target.
        double d2 = 0.0;
        for (int abc = 0; abc < 8; ++abc) d2 += (out.components[abc] - target(abc) * jd.junk).squaredNorm();
        CHECK(std::sqrt(d2) < 1e-10);
      }
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "w3cert/extraction.hpp"
#include "w3cert/moments.hpp"

using namespace w3cert;

namespace {

constexpr std::array<Generator, 7> kGenerators = {Generator::Za, Generator::Xa, Generator::Zb, Generator::Xb,
                                                   Generator::Zc, Generator::Xc, Generator::Dc};

std::vector<Generator> random_product(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, 6);
  std::vector<Generator> g(static_cast<std::size_t>(len(rng)));
  for (auto& x : g) x = kGenerators[static_cast<std::size_t>(pick(rng))];
  return g;
}

// Random realization with qutrit parties (two +1, one -1 eigenvalue per
// observable) so no qubit identities sneak in.
Realization random_qutrits(std::mt19937_64& rng) {
  std::array<PartySettings, 3> s;
  for (auto& p : s) {
    p["Z"] = oracle::random_dichotomic(rng, 3, 1);
    p["X"] = oracle::random_dichotomic(rng, 3, 2);
  }
  s[2]["D"] = oracle::random_dichotomic(rng, 3, 1);
  return Realization({3, 3, 3}, DensityOperator(oracle::depolarized(oracle::random_state(rng, 27), 0.8)), s);
}

ComplexMatrix product_operator(const Realization& r, const std::vector<Generator>& g) {
  ComplexMatrix m = identity(r.system_dimension());
  for (auto x : g) {
    const char label[2] = {letter_of(x), '\0'};
    m = m * r.embedded(party_of(x), label);
  }
  return m;
}

std::vector<std::string> party_words(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out = {""};
  std::vector<std::string> frontier = {""};
  for (std::size_t l = 1; l <= max_len; ++l) {
    std::vector<std::string> next;
    for (const auto& w : frontier) {
      for (char c : alphabet) {
        if (!w.empty() && w.back() == c) continue;
        next.push_back(w + c);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("reduction examples") {
    CHECK(OperatorWord::parse("Za Za").is_identity());
    CHECK(OperatorWord::parse("Xb Za") == OperatorWord::parse("Za Xb"));
    CHECK(OperatorWord::parse("Xb Za").to_string() == "Za Xb");
    const auto w = OperatorWord::parse("Za Xa");
    CHECK(w.adjoint() == OperatorWord::parse("Xa Za"));
    CHECK(w.canonical() == w.adjoint().canonical());
    CHECK(OperatorWord::parse("1").is_identity());
    CHECK(OperatorWord::parse("Za*Xb*Xb*Za").is_identity());
    CHECK_THROWS_AS(OperatorWord::parse("Qa"), std::invalid_argument);
    CHECK_THROWS_AS(OperatorWord::from_blocks({"D", "", ""}), std::invalid_argument);
  }

  TEST_CASE("reduction is confluent and idempotent") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_product(rng, 5);
      const auto b = random_product(rng, 5);
      const auto c = random_product(rng, 5);
      std::vector<Generator> all = a;
      all.insert(all.end(), b.begin(), b.end());
      all.insert(all.end(), c.begin(), c.end());
      const auto ra = OperatorWord::reduce(a);
      const auto rb = OperatorWord::reduce(b);
      const auto rc = OperatorWord::reduce(c);
      const auto whole = OperatorWord::reduce(all);
      CHECK(whole == (ra * rb) * rc);
      CHECK(whole == ra * (rb * rc));
      CHECK(OperatorWord::parse(whole.to_string()) == whole);
    }
  }

  TEST_CASE("reduced words evaluate to the raw products") {
    std::mt19937_64 rng(5);
    const auto r = random_qutrits(rng);
    for (int i = 0; i < 200; ++i) {
      const auto g = random_product(rng, 7);
      const auto w = OperatorWord::reduce(g);
      CHECK((word_operator(r, w) - product_operator(r, g)).norm() < 1e-10);
      CHECK((word_operator(r, w.adjoint()) - product_operator(r, g).adjoint()).norm() < 1e-10);
    }
  }

  TEST_CASE("preset sizes and per-party counts") {
    const auto l2 = preset_words(Preset::Level2);
    CHECK(l2.size() == 250);
    std::set<std::string> a_blocks;
    for (const auto& w : l2) a_blocks.insert(w.block(Party::A));
    CHECK(a_blocks == std::set<std::string>{"", "Z", "X", "ZX", "XZ"});
    const auto small = preset_words(Preset::Small);
    CHECK(small.size() == 39);
    CHECK(std::find(small.begin(), small.end(), OperatorWord{}) != small.end());
    for (const auto& w : small) CHECK(std::find(l2.begin(), l2.end(), w) != l2.end());
    CHECK(parse_preset("small") == Preset::Small);
    CHECK_THROWS_AS(parse_preset("huge"), std::invalid_argument);
  }

  TEST_CASE("equality classes match brute-force word comparison") {
    const MomentMatrixTemplate t(preset_words(Preset::Small));
    const auto& w = t.words();
    std::vector<int> counts(t.variable_count(), 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto prod = (w[i].adjoint() * w[j]).canonical();
        CHECK(t.variables()[static_cast<std::size_t>(t.cell(i, j))] == prod);
        ++counts[static_cast<std::size_t>(t.cell(i, j))];
        for (std::size_t k = 0; k < w.size(); ++k) {
          for (std::size_t l = 0; l < w.size(); ++l) {
            if ((k * w.size() + l) % 97 != (i * w.size() + j) % 97) continue;  // sampled pairs
            const bool same_word = (w[k].adjoint() * w[l]).canonical() == prod;
            CHECK((t.cell(k, l) == t.cell(i, j)) == same_word);
          }
        }
      }
    }
    CHECK(counts == t.class_sizes());
    CHECK(t.variables()[0].is_identity());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(t.cell(i, i) == 0);
    const auto it_za = std::find(w.begin(), w.end(), OperatorWord::parse("Za")) - w.begin();
    const auto it_xa = std::find(w.begin(), w.end(), OperatorWord::parse("Xa")) - w.begin();
    CHECK(t.cell(static_cast<std::size_t>(it_za), static_cast<std::size_t>(it_xa)) ==
          *t.find(OperatorWord::parse("Za Xa").canonical()));
  }

  TEST_CASE("level2 holds every word with up to three generators per party") {
    const MomentMatrixTemplate t(preset_words(Preset::Level2));
    const auto ab = party_words("ZX", 3);
    const auto c = party_words("ZXD", 3);
    std::size_t missing = 0;
    for (const auto& a : ab) {
      for (const auto& b : ab) {
        for (const auto& cc : c) {
          if (!t.find(OperatorWord::from_blocks({a, b, cc}).canonical())) ++missing;
        }
      }
    }
    CHECK(missing == 0);
    CHECK_THROWS_AS(static_cast<void>(t.functional(Polynomial(OperatorWord::parse("Za Xa Za Xa Za")))), std::out_of_range);
  }

  TEST_CASE("moment matrices of simulated realizations are PSD") {
    std::mt19937_64 rng(21);
    for (auto preset : {Preset::Small, Preset::Level2}) {
      const MomentMatrixTemplate t(preset_words(preset));
      for (const auto& r : {ideal_w3_realization(), random_qutrits(rng)}) {
        const auto y = exact_moments(t, r);
        CHECK(y[0] == doctest::Approx(1.0));
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(t.matrix(y), Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) >= -1e-9);
      }
    }
  }

  TEST_CASE("real states give real moments") {
    const MomentMatrixTemplate t(preset_words(Preset::Level2));
    const auto r = qubit_w3_realization(depolarize(w3_state(), 0.9));
    for (const auto& w : t.variables()) {
      const Complex a = r.expectation(word_operator(r, w));
      const Complex b = r.expectation(word_operator(r, w.adjoint()));
      CHECK(std::abs(a - b) < 1e-12);
      CHECK(std::abs(a.imag()) < 1e-12);
    }
  }

  TEST_CASE("fidelity functional") {
    const MomentMatrixTemplate t(preset_words(Preset::Small));
    const auto f = fidelity_objective(t);
    CHECK(std::abs(f.evaluate(exact_moments(t, ideal_w3_realization())) - 1.0) < 1e-12);
    const auto br = w_branch_polynomials();
    const auto r = ideal_w3_realization();
    const auto cross = t.functional(br[0].adjoint() * br[1]);
    CHECK(std::abs(cross.evaluate(exact_moments(t, r)) - 1.0 / 3.0) < 1e-12);
    // Direct simulator value of <T001^dagger T010>.
    const auto id = identity(8);
    auto p = [&](Party q, int o) {
      return ComplexMatrix(0.5 * (id + (o == 0 ? 1.0 : -1.0) * r.embedded(q, "Z")));
    };
    const ComplexMatrix t001 = p(Party::A, 0) * p(Party::B, 0) * r.embedded(Party::C, "X") * p(Party::C, 1);
    const ComplexMatrix t010 = p(Party::A, 0) * r.embedded(Party::B, "X") * p(Party::B, 1) * p(Party::C, 0);
    CHECK(std::abs(r.expectation(t001.adjoint() * t010) - Complex(1.0 / 3.0)) < 1e-12);
    CHECK_THROWS_AS(fidelity_objective(MomentMatrixTemplate({OperatorWord{}, OperatorWord::parse("Za")})),
                    std::out_of_range);
  }

  TEST_CASE("statistic expressions") {
    const MomentMatrixTemplate t(preset_words(Preset::Level2));
    const auto e = statistic_expression(3, t);  // P_A^0 X_B X_C
    CHECK(e.coeffs.size() == 2);
    CHECK(e.coeffs.at(*t.find(OperatorWord::parse("Xb Xc"))) == doctest::Approx(0.5));
    CHECK(e.coeffs.at(*t.find(OperatorWord::parse("Za Xb Xc"))) == doctest::Approx(0.5));

    const auto p001 = statistic_expression(0, t);
    CHECK(p001.constant == doctest::Approx(0.125));
    const std::vector<std::pair<const char*, double>> expect = {
        {"Za", 0.125},     {"Zb", 0.125},     {"Zc", -0.125},   {"Za Zb", 0.125},
        {"Za Zc", -0.125}, {"Zb Zc", -0.125}, {"Za Zb Zc", -0.125}};
    CHECK(p001.coeffs.size() == expect.size());
    for (const auto& [w, c] : expect) CHECK(p001.coeffs.at(*t.find(OperatorWord::parse(w))) == doctest::Approx(c));

    std::mt19937_64 rng(3);
    for (const auto& r : {ideal_w3_realization(), random_qutrits(rng)}) {
      const auto y = exact_moments(t, r);
      const auto s = statistics(r);
      for (std::size_t id = 0; id < kStatisticCount; ++id) {
        const double direct = id < kCorrelatorCount ? s.correlators[id] : s.triples[id - kCorrelatorCount];
        CHECK(std::abs(statistic_expression(id, t).evaluate(y) - direct) < 1e-12);
      }
    }
    CHECK_THROWS(statistic_polynomial(kStatisticCount));
  }

  TEST_CASE("assembled problem") {
    auto t = std::make_shared<const MomentMatrixTemplate>(preset_words(Preset::Level2));
    const auto p = assemble_sdp(t, 0.01);
    CHECK(p.moment_template->size() == 250);
    CHECK(p.constraints.size() == 21);
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      CHECK(p.constraints[i].upper - p.constraints[i].lower == doctest::Approx(0.02));
      CHECK((p.constraints[i].upper + p.constraints[i].lower) / 2 == doctest::Approx(statistic_ideal(i)));
    }
    const auto tight = assemble_sdp(t, 0.005);
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      CHECK(tight.constraints[i].lower >= p.constraints[i].lower);
      CHECK(tight.constraints[i].upper <= p.constraints[i].upper);
    }
    CHECK(assemble_sdp(t, 0.0, {.include_triples = false}).constraints.size() == 13);
    CHECK_THROWS_AS(assemble_sdp(t, -0.1), std::invalid_argument);
  }
}

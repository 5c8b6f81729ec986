#pragma once

// Noncommutative words over the dichotomic generators
//   A: Za, Xa     B: Zb, Xb     C: Zc, Xc, Dc
// and the moment-matrix relaxation built from them.
//
// Generators square to the identity and generators of different parties
// commute, so a reduced word is a triple of per-party blocks with no two
// equal adjacent letters. Moment matrices are taken real symmetric, which
// identifies <w> with <w^dagger>; the canonical representative of that
// pair is the lexicographically smaller one.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "w3cert/devices.hpp"

namespace w3cert {

enum class Generator : std::uint8_t { Za, Xa, Zb, Xb, Zc, Xc, Dc };

Party party_of(Generator g);
char letter_of(Generator g);  // 'Z', 'X' or 'D'

/// Parses "Za", "Xb", "Dc", ...; throws std::invalid_argument otherwise.
Generator parse_generator(std::string_view label);

class OperatorWord {
 public:
  OperatorWord() = default;

  /// Reduces an arbitrary product of generators (left to right).
  static OperatorWord reduce(std::span<const Generator> product);
  /// Parses a space- or '*'-separated product such as "Za Xb Xa"; "1" or
  /// "" is the identity.
  static OperatorWord parse(std::string_view text);
  /// Builds a word from per-party letter strings, e.g. {"ZX", "", "D"}.
  static OperatorWord from_blocks(std::array<std::string, 3> blocks);

  [[nodiscard]] const std::array<std::string, 3>& blocks() const { return blocks_; }
  [[nodiscard]] const std::string& block(Party p) const { return blocks_[static_cast<int>(p)]; }
  [[nodiscard]] bool is_identity() const;
  [[nodiscard]] std::size_t length() const;

  [[nodiscard]] OperatorWord adjoint() const;
  /// The smaller of w and w^dagger.
  [[nodiscard]] OperatorWord canonical() const;

  /// Product this * other, reduced.
  [[nodiscard]] OperatorWord operator*(const OperatorWord& other) const;

  [[nodiscard]] std::string to_string() const;

  friend auto operator<=>(const OperatorWord&, const OperatorWord&) = default;
  friend bool operator==(const OperatorWord&, const OperatorWord&) = default;

 private:
  std::array<std::string, 3> blocks_;
};

/// Real-coefficient noncommutative polynomial.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(double constant);
  explicit Polynomial(const OperatorWord& w, double coeff = 1.0);

  static Polynomial generator(Generator g);
  /// (1 + Z)/2 for outcome 0, (1 - Z)/2 for outcome 1, Z of the party.
  static Polynomial projector(Party p, int outcome);

  [[nodiscard]] const std::map<OperatorWord, double>& terms() const { return terms_; }
  [[nodiscard]] Polynomial adjoint() const;

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, Polynomial p);

 private:
  void prune();
  std::map<OperatorWord, double> terms_;
};

/// Sparse linear functional on moment variables plus a constant.
struct LinearFunctional {
  std::map<int, double> coeffs;  // variable id (never 0, the identity) -> coefficient
  double constant = 0.0;

  /// `moments` is indexed by variable id; moments[0] is ignored.
  [[nodiscard]] double evaluate(std::span<const double> moments) const;

  friend bool operator==(const LinearFunctional&, const LinearFunctional&) = default;
};

class MomentMatrixTemplate {
 public:
  /// `words` are reduced and must be distinct.
  explicit MomentMatrixTemplate(std::vector<OperatorWord> words);

  [[nodiscard]] std::size_t size() const { return words_.size(); }
  [[nodiscard]] const std::vector<OperatorWord>& words() const { return words_; }
  /// Canonical words of the moment variables; variable 0 is the identity.
  [[nodiscard]] const std::vector<OperatorWord>& variables() const { return variables_; }
  [[nodiscard]] std::size_t variable_count() const { return variables_.size(); }
  [[nodiscard]] int cell(std::size_t i, std::size_t j) const { return cells_[i * words_.size() + j]; }
  [[nodiscard]] const std::vector<int>& cells() const { return cells_; }
  /// Number of matrix cells carrying each variable.
  [[nodiscard]] const std::vector<int>& class_sizes() const { return class_sizes_; }

  /// Variable id of <w>, or nullopt when the moment is absent.
  [[nodiscard]] std::optional<int> find(const OperatorWord& w) const;

  /// Maps a polynomial's expectation onto the variables. Throws
  /// std::out_of_range naming the first word that has no variable.
  [[nodiscard]] LinearFunctional functional(const Polynomial& p) const;

  /// Fills the matrix from a moment assignment (indexed by variable id).
  [[nodiscard]] RealMatrix matrix(std::span<const double> moments) const;

 private:
  std::vector<OperatorWord> words_;
  std::vector<OperatorWord> variables_;
  std::map<OperatorWord, int> index_;
  std::vector<int> cells_;
  std::vector<int> class_sizes_;
};

enum class Preset { Small, Level2 };

std::string_view preset_name(Preset p);
/// Throws std::invalid_argument for an unknown name.
Preset parse_preset(std::string_view name);

/// Level2: all products of per-party words with at most two generators
/// (5 x 5 x 10 = 250). Small: identity, single generators, products of two
/// generators from different parties, and the words of the isometry
/// branches P_A^0 P_B^0 X_C P_C^1, P_A^0 X_B P_B^1 P_C^0, X_A P_A^1 P_B^0 P_C^0.
std::vector<OperatorWord> preset_words(Preset preset);

/// The three isometry branches T_001, T_010, T_100 as polynomials.
std::array<Polynomial, 3> w_branch_polynomials();
/// F = (1/3) sum_{t,t'} <T_t^dagger T_t'>, the fidelity of the extracted
/// ancillas with |W3>.
Polynomial fidelity_polynomial();
LinearFunctional fidelity_objective(const MomentMatrixTemplate& t);

inline constexpr std::size_t kStatisticCount = kCorrelatorCount + kTripleCount;

/// Statistic ids 0..12 are the correlators, 13..20 the triples abc.
Polynomial statistic_polynomial(std::size_t id);
LinearFunctional statistic_expression(std::size_t id, const MomentMatrixTemplate& t);
std::string statistic_name(std::size_t id);
double statistic_ideal(std::size_t id);

/// Operator of a word in a realization (needs Z, X and, for Dc, D).
ComplexMatrix word_operator(const Realization& r, const OperatorWord& w);
/// Re <w> for every template variable.
std::vector<double> exact_moments(const MomentMatrixTemplate& t, const Realization& r);

struct BoxConstraint {
  std::string name;
  LinearFunctional expr;
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const BoxConstraint&, const BoxConstraint&) = default;
};

/// minimize objective  s.t.  M(y) >= 0, <1> = 1, lower <= expr <= upper.
struct SdpProblem {
  std::shared_ptr<const MomentMatrixTemplate> moment_template;
  LinearFunctional objective;
  std::vector<BoxConstraint> constraints;
};

struct AssembleOptions {
  bool include_triples = true;
};

/// The fidelity relaxation with every statistic held to ideal +- eps.
SdpProblem assemble_sdp(std::shared_ptr<const MomentMatrixTemplate> t, double eps,
                        const AssembleOptions& options = {});

}  // namespace w3cert

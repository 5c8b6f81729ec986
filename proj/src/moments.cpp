#include "w3cert/moments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace w3cert {

namespace {

constexpr std::array<std::string_view, 3> kAlphabet{"ZX", "ZX", "ZXD"};
constexpr std::array<char, 3> kPartySuffix{'a', 'b', 'c'};

void push_letter(std::string& block, char letter) {
  if (!block.empty() && block.back() == letter) {
    block.pop_back();
  } else {
    block.push_back(letter);
  }
}

Generator make_generator(int party, char letter) {
  switch (party) {
    case 0: return letter == 'Z' ? Generator::Za : Generator::Xa;
    case 1: return letter == 'Z' ? Generator::Zb : Generator::Xb;
    default:
      return letter == 'Z' ? Generator::Zc : (letter == 'X' ? Generator::Xc : Generator::Dc);
  }
}

bool shorter_then_lex(const OperatorWord& a, const OperatorWord& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a < b;
}

}  // namespace

Party party_of(Generator g) {
  switch (g) {
    case Generator::Za:
    case Generator::Xa: return Party::A;
    case Generator::Zb:
    case Generator::Xb: return Party::B;
    default: return Party::C;
  }
}

char letter_of(Generator g) {
  switch (g) {
    case Generator::Za:
    case Generator::Zb:
    case Generator::Zc: return 'Z';
    case Generator::Dc: return 'D';
    default: return 'X';
  }
}

Generator parse_generator(std::string_view label) {
  if (label.size() == 2) {
    const auto party = std::string_view("abc").find(label[1]);
    if (party != std::string_view::npos && kAlphabet[party].find(label[0]) != std::string_view::npos) {
      return make_generator(static_cast<int>(party), label[0]);
    }
  }
  throw std::invalid_argument("unknown generator label '" + std::string(label) + "'");
}

OperatorWord OperatorWord::reduce(std::span<const Generator> product) {
  OperatorWord w;
  for (auto g : product) push_letter(w.blocks_[static_cast<int>(party_of(g))], letter_of(g));
  return w;
}

OperatorWord OperatorWord::parse(std::string_view text) {
  std::vector<Generator> gens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '*' || c == '1' || c == '\t') {
      ++i;
      continue;
    }
    if (i + 1 >= text.size()) throw std::invalid_argument("unknown generator label '" + std::string(text.substr(i)) + "'");
    gens.push_back(parse_generator(text.substr(i, 2)));
    i += 2;
  }
  return reduce(gens);
}

OperatorWord OperatorWord::from_blocks(std::array<std::string, 3> blocks) {
  OperatorWord w;
  for (int p = 0; p < 3; ++p) {
    for (char c : blocks[p]) {
      if (kAlphabet[p].find(c) == std::string_view::npos) {
        throw std::invalid_argument(std::string("unknown generator label '") + c + kPartySuffix[p] + "'");
      }
      push_letter(w.blocks_[p], c);
    }
  }
  return w;
}

bool OperatorWord::is_identity() const {
  return blocks_[0].empty() && blocks_[1].empty() && blocks_[2].empty();
}

std::size_t OperatorWord::length() const { return blocks_[0].size() + blocks_[1].size() + blocks_[2].size(); }

OperatorWord OperatorWord::adjoint() const {
  OperatorWord w = *this;
  for (auto& b : w.blocks_) std::reverse(b.begin(), b.end());
  return w;
}

OperatorWord OperatorWord::canonical() const {
  OperatorWord a = adjoint();
  return a < *this ? a : *this;
}

OperatorWord OperatorWord::operator*(const OperatorWord& other) const {
  OperatorWord w = *this;
  for (int p = 0; p < 3; ++p) {
    for (char c : other.blocks_[p]) push_letter(w.blocks_[p], c);
  }
  return w;
}

std::string OperatorWord::to_string() const {
  std::string out;
  for (int p = 0; p < 3; ++p) {
    for (char c : blocks_[p]) {
      if (!out.empty()) out.push_back(' ');
      out.push_back(c);
      out.push_back(kPartySuffix[p]);
    }
  }
  return out.empty() ? "1" : out;
}

Polynomial::Polynomial(double constant) {
  if (constant != 0.0) terms_[OperatorWord{}] = constant;
}

Polynomial::Polynomial(const OperatorWord& w, double coeff) {
  if (coeff != 0.0) terms_[w] = coeff;
}

Polynomial Polynomial::generator(Generator g) {
  const std::array<Generator, 1> one{g};
  return Polynomial(OperatorWord::reduce(one));
}

Polynomial Polynomial::projector(Party p, int outcome) {
  const auto z = make_generator(static_cast<int>(p), 'Z');
  return 0.5 * (Polynomial(1.0) + (outcome == 0 ? 1.0 : -1.0) * generator(z));
}

Polynomial Polynomial::adjoint() const {
  Polynomial out;
  for (const auto& [w, c] : terms_) out.terms_[w.adjoint()] += c;
  out.prune();
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [w, c] : other.terms_) terms_[w] += c;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) out.terms_[wa * wb] += ca * cb;
  }
  out.prune();
  return out;
}

Polynomial operator*(double s, Polynomial p) {
  for (auto& [w, c] : p.terms_) c *= s;
  p.prune();
  return p;
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < 1e-15; });
}

double LinearFunctional::evaluate(std::span<const double> moments) const {
  double v = constant;
  for (const auto& [id, c] : coeffs) v += c * moments[static_cast<std::size_t>(id)];
  return v;
}

MomentMatrixTemplate::MomentMatrixTemplate(std::vector<OperatorWord> words) : words_(std::move(words)) {
  const std::size_t n = words_.size();
  if (std::set<OperatorWord>(words_.begin(), words_.end()).size() != n) {
    throw std::invalid_argument("MomentMatrixTemplate: words must be distinct");
  }
  variables_.push_back(OperatorWord{});
  index_.emplace(OperatorWord{}, 0);
  class_sizes_.push_back(0);
  cells_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto left = words_[i].adjoint();
    for (std::size_t j = i; j < n; ++j) {
      const auto w = (left * words_[j]).canonical();
      auto [it, inserted] = index_.try_emplace(w, static_cast<int>(variables_.size()));
      if (inserted) {
        variables_.push_back(w);
        class_sizes_.push_back(0);
      }
      cells_[i * n + j] = cells_[j * n + i] = it->second;
      class_sizes_[it->second] += (i == j) ? 1 : 2;
    }
  }
}

std::optional<int> MomentMatrixTemplate::find(const OperatorWord& w) const {
  auto it = index_.find(w.canonical());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LinearFunctional MomentMatrixTemplate::functional(const Polynomial& p) const {
  LinearFunctional f;
  for (const auto& [w, c] : p.terms()) {
    if (w.is_identity()) {
      f.constant += c;
      continue;
    }
    const auto id = find(w);
    if (!id) throw std::out_of_range("moment <" + w.to_string() + "> is not in the moment matrix template");
    f.coeffs[*id] += c;
  }
  std::erase_if(f.coeffs, [](const auto& kv) { return std::abs(kv.second) < 1e-15; });
  return f;
}

RealMatrix MomentMatrixTemplate::matrix(std::span<const double> moments) const {
  const auto n = static_cast<Eigen::Index>(words_.size());
  RealMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int v = cells_[static_cast<std::size_t>(i * n + j)];
      m(i, j) = v == 0 ? 1.0 : moments[static_cast<std::size_t>(v)];
    }
  }
  return m;
}

std::string_view preset_name(Preset p) { return p == Preset::Small ? "small" : "level2"; }

Preset parse_preset(std::string_view name) {
  if (name == "small") return Preset::Small;
  if (name == "level2") return Preset::Level2;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "' (expected small or level2)");
}

std::array<Polynomial, 3> w_branch_polynomials() {
  const auto p = [](Party party, int a) { return Polynomial::projector(party, a); };
  const auto xa = Polynomial::generator(Generator::Xa);
  const auto xb = Polynomial::generator(Generator::Xb);
  const auto xc = Polynomial::generator(Generator::Xc);
  return {
      p(Party::A, 0) * p(Party::B, 0) * (xc * p(Party::C, 1)),
      p(Party::A, 0) * (xb * p(Party::B, 1)) * p(Party::C, 0),
      (xa * p(Party::A, 1)) * p(Party::B, 0) * p(Party::C, 0),
  };
}

std::vector<OperatorWord> preset_words(Preset preset) {
  std::vector<OperatorWord> words;
  if (preset == Preset::Level2) {
    const std::vector<std::string> ab{"", "Z", "X", "ZX", "XZ"};
    const std::vector<std::string> c{"", "Z", "X", "D", "ZX", "ZD", "XZ", "XD", "DZ", "DX"};
    for (const auto& a : ab) {
      for (const auto& b : ab) {
        for (const auto& cc : c) words.push_back(OperatorWord::from_blocks({a, b, cc}));
      }
    }
  } else {
    std::set<OperatorWord> set{OperatorWord{}};
    std::vector<OperatorWord> singles;
    for (int p = 0; p < 3; ++p) {
      for (char l : kAlphabet[p]) {
        std::array<std::string, 3> blocks;
        blocks[p] = std::string(1, l);
        singles.push_back(OperatorWord::from_blocks(blocks));
      }
    }
    for (const auto& s : singles) set.insert(s);
    for (const auto& s : singles) {
      for (const auto& t : singles) {
        if (s.length() == 1 && t.length() == 1 && (s * t).length() == 2) {
          const auto w = s * t;
          const bool distinct_parties =
              (w.block(Party::A).size() <= 1) && (w.block(Party::B).size() <= 1) && (w.block(Party::C).size() <= 1);
          if (distinct_parties) set.insert(w);
        }
      }
    }
    for (const auto& branch : w_branch_polynomials()) {
      for (const auto& [w, coeff] : branch.terms()) set.insert(w);
    }
    words.assign(set.begin(), set.end());
  }
  std::stable_sort(words.begin(), words.end(), shorter_then_lex);
  return words;
}

Polynomial fidelity_polynomial() {
  const auto branches = w_branch_polynomials();
  Polynomial f;
  for (const auto& s : branches) {
    const auto sd = s.adjoint();
    for (const auto& t : branches) f += sd * t;
  }
  return (1.0 / 3.0) * f;
}

LinearFunctional fidelity_objective(const MomentMatrixTemplate& t) { return t.functional(fidelity_polynomial()); }

Polynomial statistic_polynomial(std::size_t id) {
  if (id >= kStatisticCount) throw std::out_of_range("statistic id out of range");
  std::array<Factor, 3> factors{};
  if (id < kCorrelatorCount) {
    factors = correlator_specs()[id].factors;
  } else {
    const auto abc = id - kCorrelatorCount;
    for (int p = 0; p < 3; ++p) factors[p] = ((abc >> (2 - p)) & 1) ? Factor::P1 : Factor::P0;
  }
  Polynomial out(1.0);
  for (int p = 0; p < 3; ++p) {
    const auto party = static_cast<Party>(p);
    switch (factors[p]) {
      case Factor::One: break;
      case Factor::P0: out = out * Polynomial::projector(party, 0); break;
      case Factor::P1: out = out * Polynomial::projector(party, 1); break;
      case Factor::Z: out = out * Polynomial::generator(make_generator(p, 'Z')); break;
      case Factor::X: out = out * Polynomial::generator(make_generator(p, 'X')); break;
      case Factor::D:
        if (p != 2) throw std::logic_error("D is only defined for party C");
        out = out * Polynomial::generator(Generator::Dc);
        break;
    }
  }
  return out;
}

LinearFunctional statistic_expression(std::size_t id, const MomentMatrixTemplate& t) {
  return t.functional(statistic_polynomial(id));
}

std::string statistic_name(std::size_t id) {
  if (id >= kStatisticCount) throw std::out_of_range("statistic id out of range");
  if (id < kCorrelatorCount) return std::string(correlator_specs()[id].name);
  return "triple_" + triple_name(id - kCorrelatorCount);
}

double statistic_ideal(std::size_t id) {
  if (id >= kStatisticCount) throw std::out_of_range("statistic id out of range");
  if (id < kCorrelatorCount) return correlator_specs()[id].ideal;
  return ideal_statistics().triples[id - kCorrelatorCount];
}

ComplexMatrix word_operator(const Realization& r, const OperatorWord& w) {
  std::vector<ComplexMatrix> locals;
  for (int p = 0; p < 3; ++p) {
    const auto party = static_cast<Party>(p);
    ComplexMatrix m = identity(r.local_dims()[p]);
    for (char c : w.block(party)) m = m * r.local(party, std::string_view(&c, 1));
    locals.push_back(std::move(m));
  }
  return kron_all(locals);
}

std::vector<double> exact_moments(const MomentMatrixTemplate& t, const Realization& r) {
  std::vector<double> y(t.variable_count());
  y[0] = 1.0;
  for (std::size_t k = 1; k < y.size(); ++k) y[k] = r.expectation(word_operator(r, t.variables()[k])).real();
  return y;
}

SdpProblem assemble_sdp(std::shared_ptr<const MomentMatrixTemplate> t, double eps, const AssembleOptions& options) {
  if (!(eps >= 0.0)) throw std::invalid_argument("assemble_sdp: eps must be non-negative");
  SdpProblem p;
  p.objective = fidelity_objective(*t);
  const std::size_t count = options.include_triples ? kStatisticCount : kCorrelatorCount;
  for (std::size_t id = 0; id < count; ++id) {
    const double ideal = statistic_ideal(id);
    p.constraints.push_back({statistic_name(id), statistic_expression(id, *t), ideal - eps, ideal + eps});
  }
  p.moment_template = std::move(t);
  return p;
}

}  // namespace w3cert

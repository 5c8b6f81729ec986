#include "w3cert/devices.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace w3cert {

namespace {

std::string_view setting_label(Factor f) {
  switch (f) {
    case Factor::Z: return "Z";
    case Factor::X: return "X";
    case Factor::D: return "D";
    default: return "";
  }
}

char party_letter(Party p) { return "ABC"[static_cast<int>(p)]; }

}  // namespace

Realization::Realization(std::array<Eigen::Index, 3> local_dims, const State& state,
                         std::array<PartySettings, 3> settings)
    : dims_(local_dims), settings_(std::move(settings)) {
  if (const auto* psi = std::get_if<StateVector>(&state)) {
    branches_ = psi->amplitudes();
  } else {
    branches_ = purification(std::get<DensityOperator>(state));
  }
  validate();
}

Realization::Realization(std::array<Eigen::Index, 3> dims, ComplexMatrix branches,
                         std::array<PartySettings, 3> settings)
    : dims_(dims), branches_(std::move(branches)), settings_(std::move(settings)) {
  validate();
}

void Realization::validate() const {
  for (auto d : dims_) {
    if (d < 1) throw std::invalid_argument("Realization: local dimensions must be positive");
  }
  if (branches_.rows() != system_dimension()) {
    throw std::invalid_argument("Realization: state dimension does not match local dimensions");
  }
  for (int p = 0; p < 3; ++p) {
    for (const auto& [label, op] : settings_[p]) {
      if (op.rows() != dims_[p] || op.cols() != dims_[p]) {
        throw std::invalid_argument(std::string("Realization: setting ") + party_letter(Party(p)) +
                                    label + " has the wrong dimension");
      }
      if (!is_dichotomic(op)) {
        throw std::invalid_argument(std::string("Realization: setting ") + party_letter(Party(p)) +
                                    label + " is not a Hermitian involution");
      }
    }
  }
}

bool Realization::has_setting(Party p, std::string_view label) const {
  const auto& s = settings_[static_cast<int>(p)];
  return s.find(label) != s.end();
}

const ComplexMatrix& Realization::local(Party p, std::string_view label) const {
  const auto& s = settings_[static_cast<int>(p)];
  auto it = s.find(label);
  if (it == s.end()) {
    throw std::out_of_range(std::string("Realization: party ") + party_letter(p) +
                            " has no setting '" + std::string(label) + "'");
  }
  return it->second;
}

ComplexMatrix Realization::embedded(Party p, std::string_view label) const {
  return embed(p, local(p, label));
}

ComplexMatrix Realization::embed(Party p, const ComplexMatrix& local_op) const {
  std::vector<ComplexMatrix> factors;
  for (int q = 0; q < 3; ++q) {
    factors.push_back(q == static_cast<int>(p) ? local_op : identity(dims_[q]));
  }
  return kron_all(factors);
}

Complex Realization::expectation(const ComplexMatrix& system_op) const {
  if (system_op.rows() != system_dimension() || system_op.cols() != system_dimension()) {
    throw std::invalid_argument("Realization::expectation: operator dimension mismatch");
  }
  return (branches_.adjoint() * system_op * branches_).trace();
}

Realization Realization::with_settings(std::array<PartySettings, 3> settings) const {
  return Realization(dims_, branches_, std::move(settings));
}

Realization qubit_w3_realization(const Realization::State& state) {
  const ComplexMatrix d = (pauli_x() + pauli_z()) / std::sqrt(2.0);
  std::array<PartySettings, 3> s;
  for (auto& party : s) {
    party.emplace("Z", pauli_z());
    party.emplace("X", pauli_x());
  }
  s[2].emplace("D", d);
  return Realization({2, 2, 2}, state, std::move(s));
}

Realization ideal_w3_realization() { return qubit_w3_realization(w3_state()); }

const std::array<CorrelatorSpec, kCorrelatorCount>& correlator_specs() {
  using F = Factor;
  static const double r2 = std::sqrt(2.0);
  static const std::array<CorrelatorSpec, kCorrelatorCount> specs{{
      {"pA0_pB0_pC1", {F::P0, F::P0, F::P1}, 1.0 / 3.0},
      {"pA0_pB1_pC0", {F::P0, F::P1, F::P0}, 1.0 / 3.0},
      {"pA1_pB0_pC0", {F::P1, F::P0, F::P0}, 1.0 / 3.0},
      {"pA0_XB_XC", {F::P0, F::X, F::X}, 2.0 / 3.0},
      {"pA0_ZB_ZC", {F::P0, F::Z, F::Z}, -2.0 / 3.0},
      {"pA0_XB_DC", {F::P0, F::X, F::D}, r2 / 3.0},
      {"pA0_ZB_DC", {F::P0, F::Z, F::D}, -r2 / 3.0},
      {"pA0_XB_ZC", {F::P0, F::X, F::Z}, 0.0},
      {"pB0_XA_XC", {F::X, F::P0, F::X}, 2.0 / 3.0},
      {"pB0_ZA_ZC", {F::Z, F::P0, F::Z}, -2.0 / 3.0},
      {"pB0_XA_DC", {F::X, F::P0, F::D}, r2 / 3.0},
      {"pB0_ZA_DC", {F::Z, F::P0, F::D}, -r2 / 3.0},
      {"pB0_XA_ZC", {F::X, F::P0, F::Z}, 0.0},
  }};
  return specs;
}

std::string triple_name(std::size_t abc) {
  if (abc >= kTripleCount) throw std::out_of_range("triple_name: index out of range");
  return {char('0' + ((abc >> 2) & 1)), char('0' + ((abc >> 1) & 1)), char('0' + (abc & 1))};
}

double DeviationVector::max_abs() const {
  double m = 0.0;
  for (double e : eps) m = std::max(m, std::abs(e));
  return m;
}

DeviationVector DeviationVector::uniform(double e) {
  DeviationVector d;
  d.eps.fill(e);
  return d;
}

StatisticsTable ideal_statistics() {
  StatisticsTable t;
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) t.correlators[i] = correlator_specs()[i].ideal;
  t.triples[0b001] = t.triples[0b010] = t.triples[0b100] = 1.0 / 3.0;
  return t;
}

ComplexMatrix correlator_operator(const Realization& r, const std::array<Factor, 3>& factors) {
  std::vector<ComplexMatrix> locals;
  for (int p = 0; p < 3; ++p) {
    const auto party = static_cast<Party>(p);
    const auto d = r.local_dims()[p];
    switch (factors[p]) {
      case Factor::One: locals.push_back(identity(d)); break;
      case Factor::P0: locals.push_back(0.5 * (identity(d) + r.local(party, "Z"))); break;
      case Factor::P1: locals.push_back(0.5 * (identity(d) - r.local(party, "Z"))); break;
      default: locals.push_back(r.local(party, setting_label(factors[p])));
    }
  }
  return kron_all(locals);
}

StatisticsTable statistics(const Realization& r) {
  StatisticsTable t;
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) {
    t.correlators[i] = r.expectation(correlator_operator(r, correlator_specs()[i].factors)).real();
  }
  for (std::size_t abc = 0; abc < kTripleCount; ++abc) {
    const std::array<Factor, 3> f{(abc & 4) ? Factor::P1 : Factor::P0, (abc & 2) ? Factor::P1 : Factor::P0,
                                  (abc & 1) ? Factor::P1 : Factor::P0};
    t.triples[abc] = r.expectation(correlator_operator(r, f)).real();
  }
  return t;
}

namespace {

// Born distribution of the joint +-1 outcomes of one setting per party,
// indexed by 4a + 2b + c with bit 1 meaning outcome -1.
std::array<double, 8> joint_distribution(const Realization& r, const std::array<std::string_view, 3>& labels) {
  std::array<std::array<ComplexMatrix, 2>, 3> proj;
  for (int p = 0; p < 3; ++p) {
    const auto& o = r.local(static_cast<Party>(p), labels[p]);
    const auto id = identity(o.rows());
    proj[p][0] = 0.5 * (id + o);
    proj[p][1] = 0.5 * (id - o);
  }
  std::array<double, 8> probs{};
  double total = 0.0;
  for (std::size_t abc = 0; abc < 8; ++abc) {
    const auto op = kron_all({proj[0][(abc >> 2) & 1], proj[1][(abc >> 1) & 1], proj[2][abc & 1]});
    probs[abc] = std::max(0.0, r.expectation(op).real());
    total += probs[abc];
  }
  for (auto& p : probs) p /= total;
  return probs;
}

std::array<std::int64_t, 8> multinomial(const std::array<double, 8>& probs, std::int64_t shots,
                                        std::mt19937_64& rng) {
  std::array<std::int64_t, 8> counts{};
  std::int64_t remaining = shots;
  double mass_left = 1.0;
  for (std::size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
    const double q = mass_left > 0.0 ? std::clamp(probs[k] / mass_left, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> bin(remaining, q);
    counts[k] = bin(rng);
    remaining -= counts[k];
    mass_left -= probs[k];
  }
  counts.back() += remaining;
  return counts;
}

double factor_value(Factor f, int bit) {
  const double outcome = bit ? -1.0 : 1.0;
  switch (f) {
    case Factor::One: return 1.0;
    case Factor::P0: return bit ? 0.0 : 1.0;
    case Factor::P1: return bit ? 1.0 : 0.0;
    default: return outcome;
  }
}

}  // namespace

StatisticsTable sample_statistics(const Realization& r, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_statistics: shots must be positive");
  std::mt19937_64 rng(seed);
  StatisticsTable t;

  const auto zzz = multinomial(joint_distribution(r, {"Z", "Z", "Z"}), shots, rng);
  for (std::size_t abc = 0; abc < 8; ++abc) {
    t.triples[abc] = static_cast<double>(zzz[abc]) / static_cast<double>(shots);
  }
  t.correlators[0] = t.triples[0b001];
  t.correlators[1] = t.triples[0b010];
  t.correlators[2] = t.triples[0b100];

  for (std::size_t i = 3; i < kCorrelatorCount; ++i) {
    const auto& f = correlator_specs()[i].factors;
    std::array<std::string_view, 3> labels{};
    for (int p = 0; p < 3; ++p) {
      labels[p] = (f[p] == Factor::P0 || f[p] == Factor::P1) ? "Z" : setting_label(f[p]);
    }
    const auto counts = multinomial(joint_distribution(r, labels), shots, rng);
    double sum = 0.0;
    for (std::size_t abc = 0; abc < 8; ++abc) {
      sum += static_cast<double>(counts[abc]) * factor_value(f[0], (abc >> 2) & 1) *
             factor_value(f[1], (abc >> 1) & 1) * factor_value(f[2], abc & 1);
    }
    t.correlators[i] = sum / static_cast<double>(shots);
  }
  return t;
}

DeviationVector deviations(const StatisticsTable& t) {
  DeviationVector d;
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) {
    d.eps[i] = t.correlators[i] - correlator_specs()[i].ideal;
  }
  constexpr std::array<std::size_t, 5> forbidden{0b000, 0b011, 0b101, 0b110, 0b111};
  for (std::size_t k = 0; k < forbidden.size(); ++k) d.eps[kCorrelatorCount + k] = t.triples[forbidden[k]];
  return d;
}

nlohmann::ordered_json to_json(const StatisticsTable& t) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json corr = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) {
    corr[std::string(correlator_specs()[i].name)] = t.correlators[i];
  }
  nlohmann::ordered_json trip = nlohmann::ordered_json::object();
  for (std::size_t abc = 0; abc < kTripleCount; ++abc) trip[triple_name(abc)] = t.triples[abc];
  j["correlators"] = std::move(corr);
  j["triples"] = std::move(trip);
  return j;
}

StatisticsTable statistics_from_json(const nlohmann::json& j) {
  StatisticsTable t;
  const auto& corr = j.at("correlators");
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) {
    t.correlators[i] = corr.at(std::string(correlator_specs()[i].name)).get<double>();
  }
  const auto& trip = j.at("triples");
  for (std::size_t abc = 0; abc < kTripleCount; ++abc) t.triples[abc] = trip.at(triple_name(abc)).get<double>();
  return t;
}

}  // namespace w3cert

#pragma once

// Black-box realizations and the observable statistics of the W-state test.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "w3cert/qcore.hpp"

namespace w3cert {

enum class Party : int { A = 0, B = 1, C = 2 };

/// Dichotomic settings of one party keyed by label ("Z", "X", "D", or "0",
/// "1" for the tilted family). Matrices act on the party's local space.
using PartySettings = std::map<std::string, ComplexMatrix, std::less<>>;

/// A concrete quantum model of three black boxes: a shared (possibly mixed)
/// state and per-party dichotomic observables.
///
/// Mixed states are stored through a purification: `branches()` is a
/// D x r matrix W with rho = W W^dagger, where D is the product of the
/// local dimensions. Pure states have r = 1.
class Realization {
 public:
  using State = std::variant<StateVector, DensityOperator>;

  Realization(std::array<Eigen::Index, 3> local_dims, const State& state,
              std::array<PartySettings, 3> settings);

  [[nodiscard]] const std::array<Eigen::Index, 3>& local_dims() const { return dims_; }
  [[nodiscard]] Eigen::Index system_dimension() const { return dims_[0] * dims_[1] * dims_[2]; }
  [[nodiscard]] const ComplexMatrix& branches() const { return branches_; }
  [[nodiscard]] const std::array<PartySettings, 3>& settings() const { return settings_; }

  [[nodiscard]] bool has_setting(Party p, std::string_view label) const;
  /// Throws std::out_of_range if the party has no such setting.
  [[nodiscard]] const ComplexMatrix& local(Party p, std::string_view label) const;
  /// The setting embedded in the full system space.
  [[nodiscard]] ComplexMatrix embedded(Party p, std::string_view label) const;
  /// Embeds an arbitrary local operator of party p.
  [[nodiscard]] ComplexMatrix embed(Party p, const ComplexMatrix& local_op) const;

  /// Tr(rho O) for an operator on the system space.
  [[nodiscard]] Complex expectation(const ComplexMatrix& system_op) const;

  /// Copy with the same state and a different settings table.
  [[nodiscard]] Realization with_settings(std::array<PartySettings, 3> settings) const;

 private:
  Realization(std::array<Eigen::Index, 3> dims, ComplexMatrix branches,
              std::array<PartySettings, 3> settings);
  void validate() const;

  std::array<Eigen::Index, 3> dims_;
  ComplexMatrix branches_;
  std::array<PartySettings, 3> settings_;
};

/// Settings Z = sigma_z, X = sigma_x on every party and D = (sigma_x +
/// sigma_z)/sqrt(2) on C, acting on the given three-qubit state.
Realization qubit_w3_realization(const Realization::State& state);
/// The ideal realization: |W3> with the settings above.
Realization ideal_w3_realization();

inline constexpr std::size_t kCorrelatorCount = 13;
inline constexpr std::size_t kTripleCount = 8;
inline constexpr std::size_t kDeviationCount = 18;

/// Per-party factor of a correlator: identity, the Z-outcome projectors, or
/// a named setting.
enum class Factor : std::uint8_t { One, P0, P1, Z, X, D };

struct CorrelatorSpec {
  std::string_view name;
  std::array<Factor, 3> factors;
  double ideal;
};

/// The thirteen correlators in the order the W-state criterion lists them:
/// three projector triples, five P_A^0-conditioned correlators, five
/// P_B^0-conditioned correlators.
const std::array<CorrelatorSpec, kCorrelatorCount>& correlator_specs();

/// Triple index abc -> 4a + 2b + c, with a = 0 meaning Z = +1.
std::string triple_name(std::size_t abc);

struct StatisticsTable {
  std::array<double, kCorrelatorCount> correlators{};
  std::array<double, kTripleCount> triples{};  // <P_A^a P_B^b P_C^c>

  friend bool operator==(const StatisticsTable&, const StatisticsTable&) = default;
};

/// Signed deviations, observed minus ideal. Entries 0..12 are the
/// correlators; entries 13..17 are the triples 000, 011, 101, 110, 111,
/// whose ideal value is zero.
struct DeviationVector {
  std::array<double, kDeviationCount> eps{};

  /// One-based access matching the usual epsilon_1..epsilon_18 labels.
  [[nodiscard]] double at(std::size_t one_based) const { return eps.at(one_based - 1); }
  [[nodiscard]] double max_abs() const;
  static DeviationVector uniform(double e);
};

/// The ideal table of the W-state criterion.
StatisticsTable ideal_statistics();

/// Exact expectation values. Requires Z and X on every party and D on C.
StatisticsTable statistics(const Realization& r);

/// Finite-shot estimate. Each of correlators 4..13 uses its own batch of
/// `shots`; the three Z-basis correlators and the eight triples share one
/// Z,Z,Z batch. Deterministic for a fixed seed.
StatisticsTable sample_statistics(const Realization& r, std::int64_t shots, std::uint64_t seed);

DeviationVector deviations(const StatisticsTable& t);

/// Operator of a correlator (or any factor triple) on the system space.
ComplexMatrix correlator_operator(const Realization& r, const std::array<Factor, 3>& factors);

nlohmann::ordered_json to_json(const StatisticsTable& t);
StatisticsTable statistics_from_json(const nlohmann::json& j);

}  // namespace w3cert

#pragma once

// The local swap isometry: each party appends an ancilla |0>, applies
// H, controlled-Z, H, controlled-X, which maps
//
//   |Psi>|000>  ->  sum_abc  X_A^a X_B^b X_C^c P_A^a P_B^b P_C^c |Psi> |abc>
//
// with P^0 = (1 + Z)/2 and P^1 = (1 - Z)/2.

#include <array>

#include "w3cert/devices.hpp"

namespace w3cert {

struct IsometryOutput {
  /// Component vectors indexed by abc = 4a + 2b + c; each is a
  /// system_dim x r matrix (one column per purification branch).
  std::array<ComplexMatrix, 8> components;
  /// P_A^0 P_B^0 P_C^0 X_C |Psi>, the vector that fixes the junk state.
  ComplexMatrix junk_candidate;
  /// The input |Psi> (after any pre-applied operator).
  ComplexMatrix input;

  [[nodiscard]] double norm_squared() const;
  /// Reduced state of the ancillas A'B'C' (8 x 8).
  [[nodiscard]] ComplexMatrix ancilla_matrix() const;
};

/// Requires settings Z and X on every party.
IsometryOutput isometry_output(const Realization& r);
/// Applies `pre_op` (system space) to |Psi> before the isometry.
IsometryOutput isometry_output(const Realization& r, const ComplexMatrix& pre_op);

DensityOperator extracted_ancilla_state(const Realization& r);

/// <target| rho_ancilla |target> (squared-overlap fidelity).
double swap_fidelity(const Realization& r, const StateVector& target);
double swap_fidelity(const IsometryOutput& out, const StateVector& target);

struct JunkDecomposition {
  double junk_norm = 0.0;  // || P_A^0 P_B^0 P_C^0 X_C |Psi> ||
  double residual = 0.0;   // || Psi' - junk (x) target ||
  bool degenerate = false; // junk candidate vanished; a fallback junk was used
  ComplexMatrix junk;      // normalized
};

/// Splits the isometry output into junk (x) target. The junk is the
/// normalized P_A^0 P_B^0 P_C^0 X_C |Psi>. If that vector vanishes the junk
/// falls back to the normalized <target|Psi'> (or to |Psi> when that is
/// zero too) and `degenerate` is set.
JunkDecomposition junk_decomposition(const IsometryOutput& out, const StateVector& target);
JunkDecomposition junk_decomposition(const IsometryOutput& out);

/// || Psi' - junk (x) W3 || for the realization.
double norm_distance(const Realization& r);
/// min over unit junk of || Psi' - junk (x) target || = sqrt(2 - 2 sqrt(F)).
double optimal_norm_distance(const IsometryOutput& out, const StateVector& target);

}  // namespace w3cert

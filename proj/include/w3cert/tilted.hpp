#pragma once

// One-parameter family psi_gamma = (|100> + |010> + gamma |001>)/sqrt(2+gamma^2)
// certified by two tilted-CHSH tests, one conditioned on each of P_A^0, P_B^0.
//
// Boxes: A0, A1, B0, B1, C0, C1 (setting labels "0" and "1").
// Ideal settings: A0 = B0 = -sigma_z, A1 = B1 = sigma_x,
//                 C0, C1 = cos(mu) sigma_z +- sin(mu) sigma_x.
// Isometry operators: Z_A = -A0, X_A = A1 (same for B),
//                     Z_C = (C0 + C1)/(2 cos mu), X_C = (C0 - C1)/(2 sin mu).
// With these choices every derived operator is a Pauli on the ideal
// realization and P^0 = (1 + Z)/2 selects |0>.

#include <array>

#include "w3cert/devices.hpp"

namespace w3cert {

struct TiltedFamilyParams {
  double gamma = 1.0;
  double alpha = 0.0;      // tilt
  double mu = 0.0;         // tan(mu) = 2 gamma / (1 + gamma^2)
  double beta_star = 0.0;  // sqrt(8 + 2 alpha^2)
};

/// 2 (1 - g^2) / sqrt((1 - g^2)^2 + 8 g^2). Throws for gamma = 0.
double alpha_of_gamma(double gamma);
/// The alternative closed form 2 g / (1 - g^2), kept for comparison;
/// infinite at |g| = 1.
double alpha_alternative(double gamma);
TiltedFamilyParams tilted_params(double gamma);

std::array<PartySettings, 3> tilted_settings(double gamma);
Realization family_realization(double gamma);
/// Ideal settings on an arbitrary three-qubit state (e.g. a noisy psi_gamma).
Realization family_realization(double gamma, const Realization::State& state);

/// alpha a0 + a0 (b0 + b1) + a1 (b0 - b1) on the joint space of the two
/// local operators' parties (a_i (x) b_j).
ComplexMatrix tilted_bell_operator(double alpha, const ComplexMatrix& a0, const ComplexMatrix& a1,
                                   const ComplexMatrix& b0, const ComplexMatrix& b1);

struct ConditionalStatistics {
  double p10 = 0.0;     // <P_A^1 P_B^0>
  double p01 = 0.0;     // <P_A^0 P_B^1>
  double p00 = 0.0;     // <P_A^0 P_B^0>
  double bell_a = 0.0;  // <P_A^0 beta(alpha, B0, B1, C0, C1)>
  double bell_b = 0.0;  // <P_B^0 beta(alpha, A0, A1, C0, C1)>
};

ConditionalStatistics conditional_statistics(const Realization& r, double alpha);
ConditionalStatistics ideal_conditional_statistics(double gamma);

/// The realization seen through the isometry operators: settings "Z", "X"
/// on every party (and "D" = C0 on C, which equals (X+Z)/sqrt2 at
/// gamma = 1). Throws std::invalid_argument if a derived operator is not
/// dichotomic.
Realization isometry_view(const Realization& r, double gamma);

/// Fidelity of the extracted ancillas with psi_gamma.
double family_extraction(const Realization& r, double gamma);

struct BellMaximum {
  double value = 0.0;
  std::array<double, 3> angles{};  // a1, b0, b1 in the x-z plane; a0 = sigma_z
};

/// Largest eigenvalue of the tilted Bell operator over qubit observables,
/// by a coarse angle grid followed by coordinate-wise Brent refinement.
BellMaximum tilted_bell_max(double alpha, int grid = 48);

}  // namespace w3cert

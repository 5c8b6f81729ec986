#pragma once

// Analytic robustness bound on || Psi' - junk (x) W3 || from the deviations
// of the observed statistics.
//
// Notation: e_i = |eps_i|, a0 = e1+e2+e14+e15 and b0 = e1+e3+e14+e16 bound the
// deviation of <P_A^0> and <P_B^0> from 2/3.
//
//   delta_3 >= ||P_A^0 (X_B - X_C)|Psi>||,  delta_4 >= ||P_A^0 (Z_B + Z_C)|Psi>||
//   delta_1 >= ||P_A^0 {X_B, Z_B}|Psi>||,   delta_2 >= ||P_A^0 {X_C, Z_C}|Psi>||
//
// and delta_5..delta_8 are the same quantities conditioned on P_B^0 with
// the roles of A and B exchanged.

#include <array>

#include "w3cert/devices.hpp"

namespace w3cert {

struct AnalyticBoundBreakdown {
  double delta0 = 0.0;        // signed eps1+eps2+eps14+eps15
  double delta0_b = 0.0;      // signed eps1+eps3+eps14+eps16
  std::array<double, 8> delta{};  // delta_1 .. delta_8
  double residual_mass = 0.0; // e14+...+e18
  double aim_distance = 0.0;  // bound on || Psi' - Psi~ ||
  double aim_norm_lo = 0.0;   // bracket of || Psi~ ||
  double aim_norm_hi = 0.0;
  double general_raw = 0.0;
  double general = 0.0;       // clamped to [0, 2]
  double closed_raw = 0.0;    // closed form at max_i |eps_i|
  double closed = 0.0;
  bool saturated = false;     // outside the domain of the chain; general = 2

  [[nodiscard]] double d(std::size_t one_based) const { return delta.at(one_based - 1); }
};

AnalyticBoundBreakdown delta_chain(const DeviationVector& e);

/// Clamped general bound, 2 when saturated.
double norm_bound_general(const DeviationVector& e);

struct ClosedFormBound {
  double raw = 0.0;
  double clamped = 0.0;
};

/// 7.5 eps + 119.2 eps^(3/4) + 49.4 eps^(1/4). Negative eps is rejected.
ClosedFormBound norm_bound_closed(double eps);

/// The eps at which the closed-form bound reaches 2 (beyond it the bound is
/// vacuous).
double closed_form_threshold();

}  // namespace w3cert

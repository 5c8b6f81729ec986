#include "w3cert/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace w3cert {

namespace {

constexpr double kMaxDistance = 2.0;  // || a - b || for unit vectors

struct ConditionalDeltas {
  double anticomm_same;   // delta_1 (or delta_5)
  double anticomm_c;      // delta_2 (or delta_6)
  double x_diff;          // delta_3 (or delta_7)
  double z_sum;           // delta_4 (or delta_8)
};

// Bounds for the state conditioned on P^0 of one party ("conditioning"),
// with the other non-C party playing the role of B.
//   mass_dev : bound on | <P^0> - 2/3 |
//   xx, zz   : |eps| of <P^0 X X_C>, <P^0 Z Z_C>
//   xd, zd   : |eps| of <P^0 X D_C>, <P^0 Z D_C>
//   xz       : |eps| of <P^0 X Z_C>
ConditionalDeltas conditional(double mass_dev, double xx, double zz, double xd, double zd, double xz) {
  const double r2 = std::sqrt(2.0);
  ConditionalDeltas c{};
  c.x_diff = std::sqrt(2.0 * (mass_dev + xx));
  c.z_sum = std::sqrt(2.0 * (mass_dev + zz));
  // || (P^0 D_C - (P^0 X - P^0 Z)/sqrt2) |Psi> ||^2
  const double d_gap_sq = 2.0 * mass_dev + r2 * (xd + zd) + xz + std::sqrt(2.0 / 3.0 + mass_dev) * c.z_sum;
  c.anticomm_same = (2.0 + 2.0 * r2) * r2 * std::sqrt(d_gap_sq);
  c.anticomm_c = c.anticomm_same + 2.0 * c.x_diff + 2.0 * c.z_sum;
  return c;
}

}  // namespace

AnalyticBoundBreakdown delta_chain(const DeviationVector& dev) {
  AnalyticBoundBreakdown out;
  for (double x : dev.eps) {
    if (!std::isfinite(x)) {
      out.saturated = true;
      out.general_raw = out.general = out.closed_raw = out.closed = kMaxDistance;
      return out;
    }
  }
  std::array<double, kDeviationCount + 1> e{};  // one-based magnitudes
  for (std::size_t i = 1; i <= kDeviationCount; ++i) e[i] = std::abs(dev.at(i));

  out.delta0 = dev.at(1) + dev.at(2) + dev.at(14) + dev.at(15);
  out.delta0_b = dev.at(1) + dev.at(3) + dev.at(14) + dev.at(16);
  const double a0 = e[1] + e[2] + e[14] + e[15];
  const double b0 = e[1] + e[3] + e[14] + e[16];

  const auto ca = conditional(a0, e[4], e[5], e[6], e[7], e[8]);
  const auto cb = conditional(b0, e[9], e[10], e[11], e[12], e[13]);
  out.delta = {ca.anticomm_same, ca.anticomm_c, ca.x_diff, ca.z_sum,
               cb.anticomm_same, cb.anticomm_c, cb.x_diff, cb.z_sum};
  out.residual_mass = e[14] + e[15] + e[16] + e[17] + e[18];

  const auto closed = norm_bound_closed(dev.max_abs());
  out.closed_raw = closed.raw;
  out.closed = closed.clamped;

  if (3.0 * e[1] > 1.0) {
    out.saturated = true;
    out.general_raw = out.general = kMaxDistance;
    return out;
  }

  // Component-wise distance between the isometry output and
  // Psi~ = P_A^0 P_B^0 P_C^0 X_C |Psi> (|001> + |010> + |100>).
  const double eta = 0.5 * std::min(out.d(2), out.d(6));
  const double t010 = 0.5 * out.d(1) + out.d(3);
  const double t100 = 0.5 * out.d(5) + out.d(7);
  out.aim_distance = std::sqrt(eta * eta + t010 * t010 + t100 * t100 + out.residual_mass);

  const double s3 = std::sqrt(3.0);
  out.aim_norm_lo = std::max(0.0, std::sqrt(std::max(0.0, 1.0 - 3.0 * e[1])) - s3 * eta);
  out.aim_norm_hi = std::sqrt(1.0 + 3.0 * e[1]) + s3 * eta;
  const double normalization = (1.0 - std::sqrt(1.0 - 3.0 * e[1])) + s3 * eta;

  out.general_raw = out.aim_distance + normalization;
  out.general = std::clamp(out.general_raw, 0.0, kMaxDistance);
  return out;
}

double norm_bound_general(const DeviationVector& e) { return delta_chain(e).general; }

ClosedFormBound norm_bound_closed(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("norm_bound_closed: eps must be non-negative");
  ClosedFormBound b;
  b.raw = 7.5 * eps + 119.2 * std::pow(eps, 0.75) + 49.4 * std::pow(eps, 0.25);
  b.clamped = std::min(b.raw, kMaxDistance);
  return b;
}

double closed_form_threshold() {
  auto f = [](double eps) { return norm_bound_closed(eps).raw - kMaxDistance; };
  boost::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, 1e-12, 1e-2, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (lo + hi);
}

}  // namespace w3cert

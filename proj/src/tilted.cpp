#include "w3cert/tilted.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "w3cert/extraction.hpp"

namespace w3cert {

namespace {

void require_nonzero(double gamma) {
  if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be a nonzero finite real");
}

ComplexMatrix plane_observable(double angle) {
  return std::cos(angle) * pauli_z() + std::sin(angle) * pauli_x();
}

// Operators already embedded in one space, so products commute across parties.
ComplexMatrix bell_embedded(double alpha, const ComplexMatrix& a0, const ComplexMatrix& a1, const ComplexMatrix& b0,
                            const ComplexMatrix& b1) {
  return alpha * a0 + a0 * (b0 + b1) + a1 * (b0 - b1);
}

double lambda_max(double alpha, double a1, double b0, double b1) {
  const ComplexMatrix op = tilted_bell_operator(alpha, pauli_z(), plane_observable(a1), plane_observable(b0),
                                                plane_observable(b1));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(Eigen::Matrix4cd(op), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(3);
}

}  // namespace

double alpha_of_gamma(double gamma) {
  require_nonzero(gamma);
  const double g2 = gamma * gamma;
  return 2.0 * (1.0 - g2) / std::sqrt((1.0 - g2) * (1.0 - g2) + 8.0 * g2);
}

double alpha_alternative(double gamma) {
  require_nonzero(gamma);
  return 2.0 * gamma / (1.0 - gamma * gamma);
}

TiltedFamilyParams tilted_params(double gamma) {
  TiltedFamilyParams p;
  p.gamma = gamma;
  p.alpha = alpha_of_gamma(gamma);
  p.mu = std::atan(2.0 * gamma / (1.0 + gamma * gamma));
  p.beta_star = std::sqrt(8.0 + 2.0 * p.alpha * p.alpha);
  return p;
}

std::array<PartySettings, 3> tilted_settings(double gamma) {
  const double mu = tilted_params(gamma).mu;
  std::array<PartySettings, 3> s;
  for (int p = 0; p < 2; ++p) {
    s[p]["0"] = -pauli_z();
    s[p]["1"] = pauli_x();
  }
  s[2]["0"] = std::cos(mu) * pauli_z() + std::sin(mu) * pauli_x();
  s[2]["1"] = std::cos(mu) * pauli_z() - std::sin(mu) * pauli_x();
  return s;
}

Realization family_realization(double gamma) { return family_realization(gamma, psi_gamma(gamma)); }

Realization family_realization(double gamma, const Realization::State& state) {
  return Realization({2, 2, 2}, state, tilted_settings(gamma));
}

ComplexMatrix tilted_bell_operator(double alpha, const ComplexMatrix& a0, const ComplexMatrix& a1,
                                   const ComplexMatrix& b0, const ComplexMatrix& b1) {
  const auto ia = identity(a0.rows());
  const auto ib = identity(b0.rows());
  return alpha * kron(a0, ib) + kron(a0, b0 + b1) + kron(a1, b0 - b1);
}

ConditionalStatistics conditional_statistics(const Realization& r, double alpha) {
  const auto e = [&](Party p, const char* label) { return r.embedded(p, label); };
  const auto id = identity(r.system_dimension());
  const ComplexMatrix pa0 = 0.5 * (id - e(Party::A, "0"));
  const ComplexMatrix pa1 = 0.5 * (id + e(Party::A, "0"));
  const ComplexMatrix pb0 = 0.5 * (id - e(Party::B, "0"));
  const ComplexMatrix pb1 = 0.5 * (id + e(Party::B, "0"));
  ConditionalStatistics s;
  s.p10 = r.expectation(pa1 * pb0).real();
  s.p01 = r.expectation(pa0 * pb1).real();
  s.p00 = r.expectation(pa0 * pb0).real();
  const auto c0 = e(Party::C, "0");
  const auto c1 = e(Party::C, "1");
  s.bell_a = r.expectation(pa0 * bell_embedded(alpha, e(Party::B, "0"), e(Party::B, "1"), c0, c1)).real();
  s.bell_b = r.expectation(pb0 * bell_embedded(alpha, e(Party::A, "0"), e(Party::A, "1"), c0, c1)).real();
  return s;
}

ConditionalStatistics ideal_conditional_statistics(double gamma) {
  const auto p = tilted_params(gamma);
  const double norm = 2.0 + gamma * gamma;
  ConditionalStatistics s;
  s.p10 = s.p01 = 1.0 / norm;
  s.p00 = gamma * gamma / norm;
  s.bell_a = s.bell_b = p.beta_star * (1.0 + gamma * gamma) / norm;
  return s;
}

Realization isometry_view(const Realization& r, double gamma) {
  const double mu = tilted_params(gamma).mu;
  const double c = std::cos(mu);
  const double s = std::sin(mu);
  if (std::abs(c) < 1e-12 || std::abs(s) < 1e-12) throw std::invalid_argument("degenerate tilt angle");
  std::array<PartySettings, 3> v;
  for (int p = 0; p < 2; ++p) {
    const auto party = static_cast<Party>(p);
    v[p]["Z"] = -r.local(party, "0");
    v[p]["X"] = r.local(party, "1");
  }
  const auto& c0 = r.local(Party::C, "0");
  const auto& c1 = r.local(Party::C, "1");
  v[2]["Z"] = (c0 + c1) / (2.0 * c);
  v[2]["X"] = (c0 - c1) / (2.0 * s);
  v[2]["D"] = c0;
  return r.with_settings(std::move(v));
}

double family_extraction(const Realization& r, double gamma) {
  return swap_fidelity(isometry_view(r, gamma), psi_gamma(gamma));
}

// A0 is fixed to sigma_z by Alice's local rotation freedom, and real
// (x-z plane) observables suffice for a real Bell operator. Observables
// proportional to the identity make one party's pair commute, which caps
// the value at the local bound 2 + |alpha| <= sqrt(8 + 2 alpha^2), so
// they are not searched.
BellMaximum tilted_bell_max(double alpha, int grid) {
  if (grid < 4) throw std::invalid_argument("tilted_bell_max: grid too coarse");
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / grid;

  struct Point {
    double value;
    std::array<double, 3> x;
  };
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(grid) * grid * grid);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      for (int k = 0; k < grid; ++k) {
        const std::array<double, 3> x{i * h, j * h, k * h};
        pts.push_back({lambda_max(alpha, x[0], x[1], x[2]), x});
      }
    }
  }
  const std::size_t starts = std::min<std::size_t>(4, pts.size());
  std::partial_sort(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(starts), pts.end(),
                    [](const Point& a, const Point& b) { return a.value > b.value; });

  BellMaximum best{pts.front().value, pts.front().x};
  for (std::size_t s = 0; s < starts; ++s) {
    auto x = pts[s].x;
    double value = pts[s].value;
    double radius = h;
    for (int sweep = 0; sweep < 200; ++sweep) {
      const double before = value;
      for (int d = 0; d < 3; ++d) {
        auto f = [&](double t) {
          auto y = x;
          y[d] = t;
          return -lambda_max(alpha, y[0], y[1], y[2]);
        };
        const auto [t, neg] = boost::math::tools::brent_find_minima(f, x[d] - radius, x[d] + radius, 50);
        if (-neg > value) {
          value = -neg;
          x[d] = t;
        }
      }
      radius = std::max(1e-6, 0.5 * radius);
      if (value - before < 1e-15 && radius <= 1e-6) break;
    }
    if (value > best.value) best = {value, x};
  }
  for (auto& a : best.angles) a = std::remainder(a, two_pi);
  return best;
}

}  // namespace w3cert

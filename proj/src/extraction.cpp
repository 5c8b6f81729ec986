#include "w3cert/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace w3cert {

double IsometryOutput::norm_squared() const {
  double s = 0.0;
  for (const auto& c : components) s += c.squaredNorm();
  return s;
}

ComplexMatrix IsometryOutput::ancilla_matrix() const {
  ComplexMatrix rho(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) rho(i, j) = (components[j].adjoint() * components[i]).trace();
  }
  return rho;
}

IsometryOutput isometry_output(const Realization& r) {
  return isometry_output(r, identity(r.system_dimension()));
}

IsometryOutput isometry_output(const Realization& r, const ComplexMatrix& pre_op) {
  const auto dim = r.system_dimension();
  if (pre_op.rows() != dim || pre_op.cols() != dim) {
    throw std::invalid_argument("isometry_output: pre-applied operator has the wrong dimension");
  }
  std::array<std::array<ComplexMatrix, 2>, 3> proj;  // [party][a] embedded P^a
  std::array<ComplexMatrix, 3> xs;
  const auto id = identity(dim);
  for (int p = 0; p < 3; ++p) {
    const auto party = static_cast<Party>(p);
    const auto z = r.embedded(party, "Z");
    proj[p][0] = 0.5 * (id + z);
    proj[p][1] = 0.5 * (id - z);
    xs[p] = r.embedded(party, "X");
  }

  IsometryOutput out;
  out.input = pre_op * r.branches();
  for (int abc = 0; abc < 8; ++abc) {
    const int a = (abc >> 2) & 1, b = (abc >> 1) & 1, c = abc & 1;
    ComplexMatrix v = proj[0][a] * (proj[1][b] * (proj[2][c] * out.input));
    if (c) v = xs[2] * v;
    if (b) v = xs[1] * v;
    if (a) v = xs[0] * v;
    out.components[abc] = std::move(v);
  }
  out.junk_candidate = proj[0][0] * (proj[1][0] * (proj[2][0] * (xs[2] * out.input)));
  return out;
}

DensityOperator extracted_ancilla_state(const Realization& r) {
  ComplexMatrix rho = isometry_output(r).ancilla_matrix();
  rho /= rho.trace();
  return DensityOperator(std::move(rho));
}

double swap_fidelity(const IsometryOutput& out, const StateVector& target) {
  if (target.dimension() != 8) throw std::invalid_argument("swap_fidelity: target must be a 3-qubit state");
  ComplexMatrix overlap = ComplexMatrix::Zero(out.input.rows(), out.input.cols());
  for (int abc = 0; abc < 8; ++abc) overlap += std::conj(target[abc]) * out.components[abc];
  return std::clamp(overlap.squaredNorm() / out.norm_squared(), 0.0, 1.0);
}

double swap_fidelity(const Realization& r, const StateVector& target) {
  return swap_fidelity(isometry_output(r), target);
}

JunkDecomposition junk_decomposition(const IsometryOutput& out, const StateVector& target) {
  if (target.dimension() != 8) throw std::invalid_argument("junk_decomposition: target must be a 3-qubit state");
  JunkDecomposition d;
  d.junk_norm = out.junk_candidate.norm();
  if (d.junk_norm > Tolerances::exact) {
    d.junk = out.junk_candidate / d.junk_norm;
  } else {
    d.degenerate = true;
    ComplexMatrix overlap = ComplexMatrix::Zero(out.input.rows(), out.input.cols());
    for (int abc = 0; abc < 8; ++abc) overlap += std::conj(target[abc]) * out.components[abc];
    const double n = overlap.norm();
    d.junk = n > Tolerances::exact ? ComplexMatrix(overlap / n) : ComplexMatrix(out.input / out.input.norm());
  }
  double sq = 0.0;
  for (int abc = 0; abc < 8; ++abc) sq += (out.components[abc] - target[abc] * d.junk).squaredNorm();
  d.residual = std::sqrt(sq);
  return d;
}

JunkDecomposition junk_decomposition(const IsometryOutput& out) { return junk_decomposition(out, w3_state()); }

double norm_distance(const Realization& r) { return junk_decomposition(isometry_output(r)).residual; }

double optimal_norm_distance(const IsometryOutput& out, const StateVector& target) {
  const double f = swap_fidelity(out, target) * out.norm_squared();
  return std::sqrt(std::max(0.0, out.norm_squared() + 1.0 - 2.0 * std::sqrt(f)));
}

}  // namespace w3cert

#include "w3cert/qcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace w3cert {

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m * m.adjoint() - identity(m.rows())).cwiseAbs().maxCoeff() <= tol;
}

bool is_dichotomic(const ComplexMatrix& m, double tol) {
  return is_hermitian(m, tol) && (m * m - identity(m.rows())).cwiseAbs().maxCoeff() <= tol;
}

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double n = amplitudes_.norm();
  if (amplitudes_.size() == 0 || n == 0.0 || !std::isfinite(n)) {
    throw std::invalid_argument("StateVector: cannot normalize a zero or non-finite vector");
  }
  amplitudes_ /= n;
}

DensityOperator::DensityOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (!is_hermitian(matrix_, Tolerances::exact * static_cast<double>(std::max<Eigen::Index>(1, matrix_.rows())))) {
    throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > Tolerances::exact * 10) {
    throw std::invalid_argument("DensityOperator: trace is not 1");
  }
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -Tolerances::psd) {
    throw std::invalid_argument("DensityOperator: matrix has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) return identity(1);
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

Complex expect(const ComplexMatrix& op, const StateVector& state) {
  if (op.rows() != state.dimension() || op.cols() != state.dimension()) {
    throw std::invalid_argument("expect: operator and state dimensions differ");
  }
  return state.amplitudes().dot(op * state.amplitudes());
}

Complex expect(const ComplexMatrix& op, const DensityOperator& state) {
  if (op.rows() != state.dimension() || op.cols() != state.dimension()) {
    throw std::invalid_argument("expect: operator and state dimensions differ");
  }
  return (state.matrix() * op).trace();
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  if (!is_hermitian(m, Tolerances::hermitian * std::max(1.0, m.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

StateVector basis_state(std::string_view bits) {
  if (bits.empty()) throw std::invalid_argument("basis_state: empty bit string");
  Eigen::Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis_state: bits must be 0 or 1");
    index = 2 * index + (c - '0');
  }
  ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << bits.size());
  v(index) = 1.0;
  return StateVector(std::move(v));
}

StateVector w3_state() { return psi_gamma(1.0); }

StateVector psi_gamma(double gamma) {
  if (gamma == 0.0 || !std::isfinite(gamma)) {
    throw std::invalid_argument("psi_gamma: gamma must be a finite nonzero real");
  }
  ComplexVector v = ComplexVector::Zero(8);
  v(0b100) = 1.0;
  v(0b010) = 1.0;
  v(0b001) = gamma;
  return StateVector(std::move(v));
}

DensityOperator depolarize(const StateVector& state, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("depolarize: visibility must lie in [0, 1]");
  }
  const auto d = state.dimension();
  ComplexMatrix rho = visibility * (state.amplitudes() * state.amplitudes().adjoint()) +
                      ((1.0 - visibility) / static_cast<double>(d)) * identity(d);
  return DensityOperator(std::move(rho));
}

ComplexMatrix purification(const DensityOperator& rho, double cutoff) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    if (es.eigenvalues()(k) > cutoff) kept.push_back(k);
  }
  ComplexMatrix w(rho.dimension(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto k = kept[c];
    w.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(k)) * es.eigenvectors().col(k);
  }
  return w;
}

}  // namespace w3cert

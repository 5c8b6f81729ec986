#pragma once

// Dense complex linear algebra for small multi-qubit systems.
//
// Basis convention (used everywhere in the library): parties are ordered
// A, B, C and party A is the most significant tensor factor, so the
// computational basis ket |abc> has index 4a + 2b + c and
// kron(opA, kron(opB, opC)) acts on it. When a purifying reference
// system R is present it is appended after the parties, and the three
// extraction ancillas A'B'C' are appended after that, in the same
// most-significant-first order.

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace w3cert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by all modules.
struct Tolerances {
  static constexpr double exact = 1e-12;       // exact algebra
  static constexpr double eigen_residual = 1e-9;
  static constexpr double hermitian = 1e-10;
  static constexpr double unitary = 1e-10;
  static constexpr double psd = 1e-10;         // admissible negative eigenvalue
};

bool is_hermitian(const ComplexMatrix& m, double tol = Tolerances::hermitian);
bool is_unitary(const ComplexMatrix& m, double tol = Tolerances::unitary);
/// O = O^dagger and O^2 = I.
bool is_dichotomic(const ComplexMatrix& m, double tol = Tolerances::hermitian);

/// Normalized pure state. Construction normalizes; a zero vector is rejected.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);

  [[nodiscard]] Eigen::Index dimension() const { return amplitudes_.size(); }
  [[nodiscard]] const ComplexVector& amplitudes() const { return amplitudes_; }
  [[nodiscard]] Complex operator[](Eigen::Index i) const { return amplitudes_(i); }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates the invariants; throws std::invalid_argument otherwise.
  explicit DensityOperator(ComplexMatrix matrix);
  static DensityOperator pure(const StateVector& psi);

  [[nodiscard]] Eigen::Index dimension() const { return matrix_.rows(); }
  [[nodiscard]] const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are eigenvectors
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);

/// <psi|op|psi>. Throws std::invalid_argument on dimension mismatch.
Complex expect(const ComplexMatrix& op, const StateVector& state);
/// Tr(rho op).
Complex expect(const ComplexMatrix& op, const DensityOperator& state);

/// Throws std::invalid_argument for non-Hermitian input.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Computational basis state from a bit string such as "001".
StateVector basis_state(std::string_view bits);

/// (|001> + |010> + |100>) / sqrt(3).
StateVector w3_state();
/// (|100> + |010> + gamma |001>) / sqrt(2 + gamma^2); gamma = 0 is rejected.
StateVector psi_gamma(double gamma);

/// v |psi><psi| + (1 - v) I / d for v in [0, 1].
DensityOperator depolarize(const StateVector& state, double visibility);

/// Returns a dim x r matrix W with rho = W W^dagger, i.e. the columns are
/// the (unnormalized) branches of a purification on system (x) C^r.
/// Eigenvalues below `cutoff` are dropped.
ComplexMatrix purification(const DensityOperator& rho, double cutoff = 1e-14);

}  // namespace w3cert

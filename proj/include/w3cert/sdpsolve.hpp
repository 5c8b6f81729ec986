#pragma once

// Solver for the moment relaxation
//
//   minimize  c.x + c0   s.t.  M(x) = E + sum_k x_k B_k  PSD,
//                              lower_i <= (S x + s0)_i <= upper_i,
//
// where B_k marks the cells of moment class k and E the identity cells.
// Two methods: a primal-dual interior point (HKM direction, Mehrotra
// predictor-corrector; the default) and ADMM with over-relaxation on the
// splitting A x + s = b, s in PSD x box. Either way the reported bound
// does not trust the iterate: it is the value of an explicit dual
// certificate.
//
// Certificate. For Z PSD and any multipliers lambda,
//   c.x >= -<Z,E> - sum_i max(lambda_i l_i, lambda_i u_i) + lambda.s0
//          + sum_k x_k r_k,   r = c - <Z,B> + S^T lambda,
// and |x_k| <= 1 because the diagonal of M is 1. Two ways of paying for a
// nonzero r are tried and the better one kept: -||r||_1, or absorbing r
// into Z and shifting Z by t I (diagonal cells are all identity cells, so
// the shift costs only t * n).

#include <vector>

#include "w3cert/moments.hpp"

namespace w3cert {

enum class SolverMethod { InteriorPoint, Admm };

struct SolverSettings {
  SolverMethod method = SolverMethod::InteriorPoint;
  // ADMM
  int max_iterations = 20000;
  double tolerance = 1e-5;       // absolute and relative residual tolerance
  double alpha = 1.6;            // over-relaxation, in (1, 2)
  double rho = 0.1;              // initial penalty
  bool adaptive_rho = true;
  double sigma = 1e-6;
  double box_rho_scale = 10.0;   // penalty ratio box rows / matrix cells
  int check_interval = 50;       // iterations between certificate checks
  // interior point
  int ipm_max_iterations = 100;
  double ipm_tolerance = 1e-9;
  int ipm_refinement = 2;        // refinement passes per Newton solve
  int ipm_stall_iterations = 8;  // stop after this many iterations without a better bound
  bool verbose = false;          // per-iteration trace on stderr
};

enum class SolveStatus { Converged, MaxIterations, InfeasibleDetected };

const char* status_name(SolveStatus s);

struct SdpSolution {
  SolveStatus status = SolveStatus::MaxIterations;
  double bound = 0.0;             // certified lower bound on the optimum
  double primal_objective = 0.0;  // objective at the returned moments
  std::vector<double> moments;    // by variable id; moments[0] = 1
  double primal_residual = 0.0;   // worst constraint violation at `moments`
  double dual_residual = 0.0;     // max |r_k| of the certificate
  int iterations = 0;
};

/// Frobenius-nearest PSD matrix (eigenvalue clipping).
RealMatrix psd_project(const RealMatrix& s);

SdpSolution solve(const SdpProblem& p, const SolverSettings& s = {});

struct CertificateReport {
  std::vector<double> box_violations;  // per constraint, >= 0
  double min_eigenvalue = 0.0;         // of M(moments)
  double worst_violation = 0.0;        // max(box, -min_eigenvalue, 0)
  double objective = 0.0;
};

/// Recomputes feasibility of a moment assignment (indexed by variable id).
CertificateReport check_certificate(const SdpProblem& p, const std::vector<double>& moments);

}  // namespace w3cert

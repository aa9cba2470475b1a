#pragma once

#include "curlme/problems.hpp"

namespace curlme {
namespace oracle {

/// Column-stacking vectorization and its inverse. Every Kronecker identity
/// here assumes this ordering: vec(A X B) = (B^T (x) A) vec(X).
Vector vec(const DenseMatrix& x);
DenseMatrix unvec(const Vector& v, Index n1, Index n2);

struct KroneckerSystem {
  DenseMatrix A;  // n1*n2 x n1*n2
  Vector b;       // n1*n2
};

/// Dense Kronecker assembly of the step equation:
/// A = [B0^T (x) A0] - dt * (sum_i Bi^T (x) Ai + diag(vec E)),
/// b = vec(rhs). Refuses when n1*n2 exceeds the cap.
KroneckerSystem kron_assemble(const StepEquation& eq, Index cap = 40000);

/// Sparse version of the same operator (no right-hand side).
SparseMatrix kron_operator(const StepEquation& eq);

/// Full-order direct solve of the step equation via a sparse factorization
/// of the Kronecker operator; the result's relative residual is checked
/// against 1e-10. Refuses past the cap.
DenseMatrix fom_solve(const StepEquation& eq, Index cap = 40000);

/// Eckart-Young truncation from the SVD.
LowRankState best_rank_r(const DenseMatrix& x, Index r);

/// Dense full-order implicit stepping (factorization reused across steps).
DenseMatrix fom_transient(const LMEProblem& problem, TimeScheme scheme,
                          double dt, int n_steps, const DenseMatrix& x0,
                          Index cap = 40000);

/// Classical RK4 on dX/dt = A0^-1 (sum Ai X Bi + E.*X - C) B0^-1.
DenseMatrix rk4_reference(const LMEProblem& problem, double dt, int n_steps,
                          const DenseMatrix& x0, Index cap = 40000);

/// Dense steady solve of sum Ai X Bi + E.*X = C.
DenseMatrix fom_steady(const LMEProblem& steady, Index cap = 40000);

struct NewtonTrace {
  DenseMatrix x;
  std::vector<double> delta_norms;
  bool converged = false;
};

/// Dense Newton iteration with the Hadamard Jacobian entering the Kronecker
/// operator as a diagonal.
NewtonTrace fom_newton(const NonlinearProblem& problem, const DenseMatrix& x0,
                       double tol, int max_iters = 30, Index cap = 40000);

/// Plain restarted GMRES on a dense linear system, for cross-checking the
/// matrix-valued solver against the vectorized formulation.
GmresResult scalar_gmres(const DenseMatrix& a, const Vector& b,
                         const Vector& x0, Index m, double tol,
                         int max_restarts = 10000);

}  // namespace oracle
}  // namespace curlme

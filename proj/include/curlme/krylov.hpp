#pragma once

#include "curlme/dense.hpp"
#include "curlme/sparse.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace curlme {

/// One side of a two-sided product term: identity, sparse, or small dense.
struct OperatorSide {
  enum class Kind { identity, sparse, dense };

  Kind kind = Kind::identity;
  std::shared_ptr<const SparseMatrix> sp;
  DenseMatrix dn;

  static OperatorSide make_identity() { return {}; }
  static OperatorSide make_sparse(std::shared_ptr<const SparseMatrix> m) {
    OperatorSide s;
    s.kind = Kind::sparse;
    s.sp = std::move(m);
    return s;
  }
  static OperatorSide make_dense(DenseMatrix m) {
    OperatorSide s;
    s.kind = Kind::dense;
    s.dn = std::move(m);
    return s;
  }

  bool is_identity() const { return kind == Kind::identity; }

  DenseMatrix apply_left(const DenseMatrix& x) const;   // S * x
  DenseMatrix apply_right(const DenseMatrix& x) const;  // x * S
};

/// The multi-term linear map X -> A0 X B0 - dt * (sum_i Ai X Bi + E .* X).
/// When has_mass is false the A0 X B0 term is absent. The optional Hadamard
/// block E has the shape of the operand.
struct LinearMatrixOperator {
  bool has_mass = true;
  OperatorSide A0, B0;
  std::vector<std::pair<OperatorSide, OperatorSide>> terms;
  std::optional<DenseMatrix> hadamard;
  double dt = 0.0;
};

DenseMatrix apply_operator(const LinearMatrixOperator& op, const DenseMatrix& x);

struct GmresStats {
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  double rel_residual = 0.0;
  std::vector<double> residual_history;  // estimated |r| after each iteration
};

struct GmresResult {
  DenseMatrix x;
  GmresStats stats;
};

/// Restarted GMRES on matrix operands under the Frobenius inner product.
/// Arnoldi uses modified Gram-Schmidt with one reorthogonalization pass when
/// the norm drops below 0.7x during orthogonalization. Convergence is
/// ||rhs - op(x)||_F <= tol * ||rhs||_F (absolute when rhs is zero); a
/// subdiagonal below 1e-14 * ||rhs||_F ends the cycle with the current
/// least-squares solution.
GmresResult gmres_lme(const LinearMatrixOperator& op, const DenseMatrix& rhs,
                      const DenseMatrix& x0, Index m, double tol,
                      int max_restarts = 10000);

}  // namespace curlme

#pragma once

#include "curlme/cur.hpp"
#include "curlme/krylov.hpp"

#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace curlme {

/// A matrix known through row/column evaluation. Dense and factored
/// (L * R^T) sources keep their exact Frobenius norm and, when factored,
/// their factors, so right-hand-side norms can be computed exactly.
struct MatrixAccessor {
  Index rows = 0;
  Index cols = 0;
  double norm_hint = -1.0;  // exact ||.||_F when >= 0
  std::function<DenseMatrix(IndexSpan q)> col_block;
  std::function<DenseMatrix(IndexSpan p)> row_block;
  std::shared_ptr<const DenseMatrix> left_factor;   // set for factored sources
  std::shared_ptr<const DenseMatrix> right_factor;  // M = L * R^T

  bool valid() const { return static_cast<bool>(col_block) && static_cast<bool>(row_block); }
  DenseMatrix to_dense() const;

  static MatrixAccessor zero(Index rows, Index cols);
  static MatrixAccessor from_dense(DenseMatrix m);
  static MatrixAccessor from_factors(DenseMatrix l, DenseMatrix r);
  static MatrixAccessor from_state(LowRankState s);
};

/// Linear matrix problem in evolution or steady form.
/// transient: A0 dX/dt B0 = sum_i Ai X Bi + E .* X - C(t)
/// steady:    sum_i Ai X Bi + E .* X = C
/// A time-modulated part C(t) = C + osc_coef(t) * C_osc is optional; the
/// coefficient matrices themselves are constant.
struct LMEProblem {
  Index n1 = 0, n2 = 0;
  bool transient = true;
  OperatorSide A0, B0;
  std::vector<std::pair<std::shared_ptr<const SparseMatrix>,
                        std::shared_ptr<const SparseMatrix>>> terms;
  std::optional<MatrixAccessor> hadamard;
  MatrixAccessor C;
  std::optional<MatrixAccessor> C_osc;
  std::function<double(double)> osc_coef;

  /// C + osc_coef(t) * C_osc evaluated at time t.
  MatrixAccessor rhs_at(double t) const;
};

/// wa * a + wb * b; exact factors are concatenated when both sides have them.
MatrixAccessor accessor_sum(const MatrixAccessor& a, double wa,
                            const MatrixAccessor& b, double wb);

/// One assembled linear matrix equation
///   [A0 X B0] - dt * (sum_i Ai X Bi + E .* X)
///     = [A0 * (sum_j w_j Xhist_j) * B0] - dt * C,
/// the bracketed mass terms present only when has_mass is set. Covers an
/// implicit time step (dt = scaled time step, history = previous states), a
/// pseudo-time step (identity mass), and the direct steady equation (first
/// term moved into the mass slot, dt = -1, empty history).
struct StepEquation {
  Index n1 = 0, n2 = 0;
  bool has_mass = false;
  OperatorSide A0, B0;
  std::vector<std::pair<std::shared_ptr<const SparseMatrix>,
                        std::shared_ptr<const SparseMatrix>>> terms;
  std::optional<MatrixAccessor> hadamard;
  MatrixAccessor C;
  double dt = 0.0;
  std::vector<std::pair<double, LowRankState>> history;
};

StepEquation make_pseudo_time_step(const LMEProblem& steady, double dtau,
                                   const LowRankState& prev);
StepEquation make_steady_direct(const LMEProblem& steady);

/// Columns [A X B](:, q) for low-rank X, using exact sparse column slices of
/// B. Sides must be identity or sparse.
DenseMatrix product_cols(const OperatorSide& a, const OperatorSide& b,
                         const LowRankState& x, IndexSpan q);
/// Rows [A X B](p, :), using exact sparse row slices of A.
DenseMatrix product_rows(const OperatorSide& a, const OperatorSide& b,
                         const LowRankState& x, IndexSpan p);

/// [operator(x)](:, q) and [operator(x)](p, :) of the step equation's
/// left-hand side, evaluated exactly at the sampled indices.
DenseMatrix lhs_cols(const StepEquation& eq, const LowRankState& x, IndexSpan q);
DenseMatrix lhs_rows(const StepEquation& eq, const LowRankState& x, IndexSpan p);

/// Sampled slices of the right-hand side (mass-weighted history minus dt*C).
DenseMatrix rhs_cols(const StepEquation& eq, IndexSpan q);
DenseMatrix rhs_rows(const StepEquation& eq, IndexSpan p);

/// Sampler for the residual lhs(x) - rhs of the step equation.
MatrixSampler residual_sampler(const StepEquation& eq, const LowRankState& x);
/// Sampler for the difference a - b of two compressed states.
MatrixSampler difference_sampler(const LowRankState& a, const LowRankState& b);

/// ||rhs||_F: exact when the history and C expose factors, otherwise a
/// cross-approximation estimate at sampling rank est_rank.
double rhs_norm(const StepEquation& eq, Index est_rank, std::mt19937_64& rng);

/// Dense assembly of the step equation pieces (oracle and tests only).
LinearMatrixOperator full_operator(const StepEquation& eq);
DenseMatrix rhs_dense(const StepEquation& eq);

}  // namespace curlme

#pragma once

#include "curlme/dense.hpp"
#include "curlme/selection.hpp"

#include <functional>
#include <random>

namespace curlme {

/// Rank-r matrix in SVD form U * diag(sigma) * Y^T.
struct LowRankState {
  DenseMatrix U;  // n1 x r, orthonormal columns
  Vector sigma;   // r, descending nonnegative
  DenseMatrix Y;  // n2 x r, orthonormal columns

  Index rank() const { return sigma.size(); }
  Index rows() const { return U.rows(); }
  Index cols() const { return Y.rows(); }
  double frob_norm() const { return sigma.norm(); }

  /// U * diag(sigma) * Y(q, :)^T, the columns at q.
  DenseMatrix col_block(IndexSpan q) const;
  /// U(p, :) * diag(sigma) * Y^T, the rows at p.
  DenseMatrix row_block(IndexSpan p) const;
  DenseMatrix to_dense() const;
};

/// Error-constant diagnostics for an interpolatory cross approximation:
/// eta_r = ||U(p,:)^-1||_2, eta_c = ||Y(q,:)^-1||_2,
/// c_bound = min{eta_r (1 + eta_c), eta_c (1 + eta_r)}.
struct CurDiagnostics {
  double eta_r;
  double eta_c;
  double c_bound;
};

/// Build the SVD-form factorization from sampled columns X(:,q) and rows
/// X(p,:): economy SVDs of both slices, an interpolation core from the
/// intersection block, and in-subspace rotations. For a matrix of exact rank
/// <= r with well-posed index sets the result reproduces it exactly.
/// Throws if cols(p,:) and rows(:,q) disagree beyond consistency_tol
/// (relative), which indicates a sampling bug upstream.
LowRankState stable_cur(const DenseMatrix& cols, const DenseMatrix& rows,
                        IndexSpan p, IndexSpan q,
                        double consistency_tol = 1e-8);

/// stable_cur with an explicitly supplied intersection block X(p,q) and no
/// consistency check. Used inside the fixed-point sweep, where the column and
/// row solves only agree on the intersection once the iteration has
/// converged.
LowRankState stable_cur_core(const DenseMatrix& cols, const DenseMatrix& rows,
                             const DenseMatrix& core, IndexSpan p, IndexSpan q);

CurDiagnostics cur_diagnostics(const DenseMatrix& u, const DenseMatrix& y,
                               IndexSpan p, IndexSpan q);

/// Row/column evaluation callbacks for a matrix that is sampled rather than
/// formed. col_block returns rows x |q|, row_block returns |p| x cols.
struct MatrixSampler {
  Index rows = 0;
  Index cols = 0;
  std::function<DenseMatrix(IndexSpan q)> col_block;
  std::function<DenseMatrix(IndexSpan p)> row_block;
};

struct NormEstimate {
  LowRankState state;
  double norm;  // ||sigma||_2 of the captured factorization
};

/// Cross-approximate the sampled matrix at rank_est indices chosen from the
/// previous estimate's singular vectors (seeded random orthonormal bases when
/// none exist) and return the factorization together with its Frobenius
/// norm. The sample rank doubles adaptively while the smallest captured
/// singular value exceeds 1% of the largest.
NormEstimate lowrank_norm_estimate(const MatrixSampler& sampler,
                                   const LowRankState* prev,
                                   Index rank_est, std::mt19937_64& rng);

/// Orthonormal n x r matrix from a seeded generator (QR of a Gaussian draw,
/// deterministic sign fix).
DenseMatrix random_orthonormal(Index n, Index r, std::mt19937_64& rng);

/// Recompress w1 * a + w2 * b to rank at most max_rank via stacked factors.
LowRankState add_states(const LowRankState& a, double w1, const LowRankState& b,
                        double w2, Index max_rank);

/// Keep the leading r triples.
LowRankState truncate_state(const LowRankState& s, Index r);

/// Append delta_r fresh directions orthogonal to the current bases, with new
/// singular values sigma_r * 1e-8, so the existing state stays the dominant
/// initial guess.
LowRankState augment_rank(const LowRankState& s, Index delta_r,
                          std::mt19937_64& rng);

/// SVD-form state from a dense matrix, truncated to rank r (padded with
/// random orthogonal directions if the matrix rank is lower).
LowRankState state_from_dense(const DenseMatrix& x, Index r,
                              std::mt19937_64& rng);

}  // namespace curlme

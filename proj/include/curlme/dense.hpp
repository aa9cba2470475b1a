#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace curlme {

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVector = std::vector<Index>;
using IndexSpan = std::span<const Index>;

/// Economy SVD factors with singular values in descending order.
/// Column signs follow a fixed convention (largest-magnitude entry of each
/// left singular vector is positive) so repeated factorizations of the same
/// matrix are bit-identical.
struct SvdFactors {
  DenseMatrix left;   // n1 x k, orthonormal columns
  Vector sigma;       // k, descending, nonnegative
  DenseMatrix right;  // n2 x k, orthonormal columns

  Index rank() const { return sigma.size(); }
};

/// Economy SVD of a finite matrix. Throws std::invalid_argument on
/// non-finite input.
SvdFactors thin_svd(const DenseMatrix& m);

/// Minimum-norm least-squares solve m * z = rhs via SVD with singular value
/// cutoff max(dims) * eps * sigma_max. Rank-deficient m is handled by the
/// cutoff rather than an error.
DenseMatrix pseudo_solve(const DenseMatrix& m, const DenseMatrix& rhs);

/// Moore-Penrose pseudoinverse with the same cutoff as pseudo_solve.
DenseMatrix pseudo_inverse(const DenseMatrix& m);

/// Frobenius inner product trace(q1^T q2). Throws on shape mismatch.
double frob_inner(const DenseMatrix& q1, const DenseMatrix& q2);

/// Largest singular value.
double spectral_norm(const DenseMatrix& m);

/// Spectral norm of the inverse, i.e. 1/sigma_min. Throws std::runtime_error
/// if the matrix is numerically singular.
double inverse_spectral_norm(const DenseMatrix& m);

/// Rows (or columns) of m at the given indices.
DenseMatrix select_rows(const DenseMatrix& m, IndexSpan p);
DenseMatrix select_cols(const DenseMatrix& m, IndexSpan q);

}  // namespace curlme

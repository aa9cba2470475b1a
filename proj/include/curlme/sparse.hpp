#pragma once

#include "curlme/dense.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace curlme {

/// Compressed-row sparse matrix. A column-compressed mirror of the structure
/// is built at construction so column slices and column supports are cheap.
/// Explicitly stored zeros are kept: structural queries depend only on the
/// sparsity pattern, not on values.
class SparseMatrix {
 public:
  struct Triplet {
    Index row, col;
    double value;
  };

  SparseMatrix() = default;

  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(Index n);
  static SparseMatrix from_dense(const DenseMatrix& m, double drop_tol = 0.0);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return row_ptr_; }
  const std::vector<Index>& column_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Scale all values in place (structure unchanged).
  void scale(double a);

  DenseMatrix to_dense() const;
  SparseMatrix transposed() const;

  /// Dense block m(p, q).
  DenseMatrix block(IndexSpan p, IndexSpan q) const;

  /// A * X.
  DenseMatrix left_mul(const DenseMatrix& x) const;
  /// X * A.
  DenseMatrix right_mul(const DenseMatrix& x) const;

  /// A(p, :) * X without forming the dense row slice.
  DenseMatrix rows_times(IndexSpan p, const DenseMatrix& x) const;
  /// A(:, q)^T * X, accumulated column by column.
  DenseMatrix cols_transpose_times(IndexSpan q, const DenseMatrix& x) const;

  /// Sorted distinct row indices j such that (j, q_k) is a stored entry for
  /// some k. Structure-based: stored zeros count.
  IndexVector column_support(IndexSpan q) const;
  /// Sorted distinct column indices j such that (p_k, j) is stored for some k.
  IndexVector row_support(IndexSpan p) const;

 private:
  void build_column_index();

  Index rows_ = 0, cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  // column-compressed mirror: col_ptr_/row_idx_ index into positions of the
  // CSR value array via val_pos_
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<Index> val_pos_;
};

/// A * X for sparse A, dense X.
DenseMatrix sp_left_mul(const SparseMatrix& a, const DenseMatrix& x);
/// X * B for dense X, sparse B.
DenseMatrix sp_right_mul(const DenseMatrix& x, const SparseMatrix& b);

/// Matrix Market coordinate format (real general).
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const SparseMatrix& m, const std::string& path);
SparseMatrix read_matrix_market_stream(std::istream& in);
void write_matrix_market_stream(const SparseMatrix& m, std::ostream& out);

/// Dense round-trip layout: "rows cols" header line followed by row-major
/// values, one row per line.
DenseMatrix read_dense(const std::string& path);
void write_dense(const DenseMatrix& m, const std::string& path);

}  // namespace curlme

#pragma once

#include "curlme/dense.hpp"
#include "curlme/sparse.hpp"

namespace curlme {

/// Greedy interpolation-index selection on the columns of a basis with
/// linearly independent columns (orthonormal in practice). The first index
/// maximizes |u_1|; each subsequent index maximizes the magnitude of the
/// residual of the next column after interpolation at the indices chosen so
/// far. Ties break toward the lowest index. Requires basis.cols() <=
/// basis.rows().
IndexVector deim(const DenseMatrix& basis);

/// Union of the row indices at which B(:, q) has stored entries, sorted.
IndexVector find_adjacent(const SparseMatrix& b, IndexSpan q);

/// Union of the column indices at which A(p, :) has stored entries, sorted.
IndexVector find_adjacent_rows(const SparseMatrix& a, IndexSpan p);

}  // namespace curlme

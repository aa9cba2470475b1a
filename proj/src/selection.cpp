#include "curlme/selection.hpp"

#include <cmath>
#include <stdexcept>

namespace curlme {

namespace {

Index argmax_abs(const Vector& v) {
  Index best = 0;
  double vmax = std::abs(v(0));
  for (Index i = 1; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > vmax) {
      vmax = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

IndexVector deim(const DenseMatrix& basis) {
  const Index n = basis.rows();
  const Index r = basis.cols();
  if (r < 1) throw std::invalid_argument("deim: empty basis");
  if (r > n) throw std::invalid_argument("deim: more columns than rows");
  if (!basis.allFinite()) throw std::invalid_argument("deim: non-finite basis");

  IndexVector indices;
  indices.reserve(static_cast<size_t>(r));
  indices.push_back(argmax_abs(basis.col(0)));

  for (Index i = 1; i < r; ++i) {
    // interpolate column i on the chosen indices, then pick the largest
    // residual entry
    DenseMatrix sub = select_rows(basis.leftCols(i), indices);
    Eigen::FullPivLU<DenseMatrix> lu(sub);
    if (lu.rank() < i)
      throw std::runtime_error(
          "deim: singular interpolation system at step " + std::to_string(i) +
          " (basis columns dependent on selected rows)");
    Vector rhs = select_rows(basis.col(i), indices).col(0);
    Vector c = lu.solve(rhs);
    Vector residual = basis.col(i) - basis.leftCols(i) * c;
    indices.push_back(argmax_abs(residual));
  }
  return indices;
}

IndexVector find_adjacent(const SparseMatrix& b, IndexSpan q) {
  return b.column_support(q);
}

IndexVector find_adjacent_rows(const SparseMatrix& a, IndexSpan p) {
  return a.row_support(p);
}

}  // namespace curlme

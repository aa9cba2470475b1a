#include "curlme/dense.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace curlme {

namespace {

// Flip factor columns so the largest-magnitude entry of each left column is
// positive; ties resolved by the lowest row index.
void fix_signs(DenseMatrix& left, DenseMatrix& right) {
  for (Index j = 0; j < left.cols(); ++j) {
    Index imax = 0;
    double vmax = std::abs(left(0, j));
    for (Index i = 1; i < left.rows(); ++i) {
      const double v = std::abs(left(i, j));
      if (v > vmax) {
        vmax = v;
        imax = i;
      }
    }
    if (left(imax, j) < 0.0) {
      left.col(j) = -left.col(j);
      right.col(j) = -right.col(j);
    }
  }
}

}  // namespace

SvdFactors thin_svd(const DenseMatrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("thin_svd: non-finite input");

  SvdFactors f;
  if (m.rows() >= 128 || m.cols() >= 128) {
    Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    f.left = svd.matrixU();
    f.sigma = svd.singularValues();
    f.right = svd.matrixV();
  } else {
    Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    f.left = svd.matrixU();
    f.sigma = svd.singularValues();
    f.right = svd.matrixV();
  }
  fix_signs(f.left, f.right);
  return f;
}

DenseMatrix pseudo_solve(const DenseMatrix& m, const DenseMatrix& rhs) {
  if (m.rows() != rhs.rows())
    throw std::invalid_argument("pseudo_solve: row count mismatch");

  Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        std::numeric_limits<double>::epsilon() *
                        (s.size() > 0 ? s(0) : 0.0);

  DenseMatrix ut_rhs = svd.matrixU().transpose() * rhs;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff)
      ut_rhs.row(i) /= s(i);
    else
      ut_rhs.row(i).setZero();
  }
  return svd.matrixV() * ut_rhs;
}

DenseMatrix pseudo_inverse(const DenseMatrix& m) {
  return pseudo_solve(m, DenseMatrix::Identity(m.rows(), m.rows()));
}

double frob_inner(const DenseMatrix& q1, const DenseMatrix& q2) {
  if (q1.rows() != q2.rows() || q1.cols() != q2.cols())
    throw std::invalid_argument("frob_inner: shape mismatch");
  return q1.cwiseProduct(q2).sum();
}

double spectral_norm(const DenseMatrix& m) {
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double inverse_spectral_norm(const DenseMatrix& m) {
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  const Vector& s = svd.singularValues();
  const Index k = std::min(m.rows(), m.cols());
  const double smin = (s.size() == k && k > 0) ? s(k - 1) : 0.0;
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        std::numeric_limits<double>::epsilon() *
                        (s.size() > 0 ? s(0) : 0.0);
  if (smin <= cutoff) throw std::runtime_error("inverse_spectral_norm: singular matrix");
  return 1.0 / smin;
}

DenseMatrix select_rows(const DenseMatrix& m, IndexSpan p) {
  DenseMatrix out(static_cast<Index>(p.size()), m.cols());
  for (Index i = 0; i < out.rows(); ++i) out.row(i) = m.row(p[i]);
  return out;
}

DenseMatrix select_cols(const DenseMatrix& m, IndexSpan q) {
  DenseMatrix out(m.rows(), static_cast<Index>(q.size()));
  for (Index j = 0; j < out.cols(); ++j) out.col(j) = m.col(q[j]);
  return out;
}

}  // namespace curlme

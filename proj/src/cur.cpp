#include "curlme/cur.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curlme {

namespace {

void fix_column_signs(DenseMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index imax = 0;
    double vmax = std::abs(m(0, j));
    for (Index i = 1; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > vmax) {
        vmax = std::abs(m(i, j));
        imax = i;
      }
    }
    if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
  }
}

DenseMatrix thin_q(const DenseMatrix& m) {
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  const Index k = std::min(m.rows(), m.cols());
  return DenseMatrix(qr.householderQ() * DenseMatrix::Identity(m.rows(), k));
}

}  // namespace

DenseMatrix LowRankState::col_block(IndexSpan q) const {
  return U * (sigma.asDiagonal() * select_rows(Y, q).transpose());
}

DenseMatrix LowRankState::row_block(IndexSpan p) const {
  return (select_rows(U, p) * sigma.asDiagonal()) * Y.transpose();
}

DenseMatrix LowRankState::to_dense() const {
  return U * sigma.asDiagonal() * Y.transpose();
}

LowRankState stable_cur(const DenseMatrix& cols, const DenseMatrix& rows,
                        IndexSpan p, IndexSpan q, double consistency_tol) {
  const DenseMatrix xpq_cols = select_rows(cols, p);
  const DenseMatrix xpq_rows = select_cols(rows, q);
  const double scale = std::max(xpq_cols.norm(), xpq_rows.norm());
  const double mismatch = (xpq_cols - xpq_rows).norm();
  if (mismatch > consistency_tol * std::max(scale, 1e-300))
    throw std::runtime_error(
        "stable_cur: sampled rows and columns disagree on the intersection "
        "(relative mismatch " + std::to_string(mismatch / std::max(scale, 1e-300)) + ")");
  return stable_cur_core(cols, rows, 0.5 * (xpq_cols + xpq_rows), p, q);
}

LowRankState stable_cur_core(const DenseMatrix& cols, const DenseMatrix& rows,
                             const DenseMatrix& core, IndexSpan p, IndexSpan q) {
  const Index r_p = static_cast<Index>(p.size());
  const Index r_q = static_cast<Index>(q.size());
  if (cols.cols() != r_q || rows.rows() != r_p)
    throw std::invalid_argument("stable_cur: slice shapes do not match index sets");
  if (core.rows() != r_p || core.cols() != r_q)
    throw std::invalid_argument("stable_cur: core shape mismatch");

  const SvdFactors col_svd = thin_svd(cols);
  const SvdFactors row_svd = thin_svd(rows);
  const DenseMatrix& u_q = col_svd.left;   // n1 x r
  const DenseMatrix& y_p = row_svd.right;  // n2 x r

  // C = U_q(p,:)^+ X(p,q) (Y_p(q,:)^+)^T, then rotate its SVD into the
  // sampled subspaces
  const DenseMatrix t = pseudo_solve(select_rows(u_q, p), core);
  const DenseMatrix rotated =
      pseudo_solve(select_rows(y_p, q), t.transpose()).transpose();

  const SvdFactors core_svd = thin_svd(rotated);
  LowRankState s;
  s.U = u_q * core_svd.left;
  s.sigma = core_svd.sigma;
  s.Y = y_p * core_svd.right;
  return s;
}

CurDiagnostics cur_diagnostics(const DenseMatrix& u, const DenseMatrix& y,
                               IndexSpan p, IndexSpan q) {
  if (static_cast<Index>(p.size()) != u.cols() ||
      static_cast<Index>(q.size()) != y.cols())
    throw std::invalid_argument("cur_diagnostics: interpolation blocks not square");
  CurDiagnostics d;
  d.eta_r = inverse_spectral_norm(select_rows(u, p));
  d.eta_c = inverse_spectral_norm(select_rows(y, q));
  d.c_bound = std::min(d.eta_r * (1.0 + d.eta_c), d.eta_c * (1.0 + d.eta_r));
  return d;
}

DenseMatrix random_orthonormal(Index n, Index r, std::mt19937_64& rng) {
  if (r > n) throw std::invalid_argument("random_orthonormal: r > n");
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix g(n, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
  DenseMatrix q = thin_q(g);
  fix_column_signs(q);
  return q;
}

namespace {

// prev bases extended with random orthogonal directions up to r columns
DenseMatrix extend_basis(const DenseMatrix& basis, Index r, std::mt19937_64& rng) {
  const Index n = basis.rows();
  const Index have = std::min(basis.cols(), r);
  if (have == r) return basis.leftCols(r);
  DenseMatrix out(n, r);
  out.leftCols(have) = basis.leftCols(have);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index j = have; j < r; ++j) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
    for (int pass = 0; pass < 2; ++pass)
      v -= out.leftCols(j) * (out.leftCols(j).transpose() * v);
    out.col(j) = v / v.norm();
  }
  return out;
}

}  // namespace

NormEstimate lowrank_norm_estimate(const MatrixSampler& sampler,
                                   const LowRankState* prev, Index rank_est,
                                   std::mt19937_64& rng) {
  if (!sampler.col_block || !sampler.row_block)
    throw std::invalid_argument("lowrank_norm_estimate: sampler callbacks missing");
  const Index cap = std::min(sampler.rows, sampler.cols);
  Index r_est = std::min(rank_est, cap);
  if (r_est < 1) throw std::invalid_argument("lowrank_norm_estimate: empty target");

  for (;;) {
    DenseMatrix basis_u, basis_y;
    if (prev && prev->rank() > 0) {
      basis_u = extend_basis(prev->U, r_est, rng);
      basis_y = extend_basis(prev->Y, r_est, rng);
    } else {
      basis_u = random_orthonormal(sampler.rows, r_est, rng);
      basis_y = random_orthonormal(sampler.cols, r_est, rng);
    }
    const IndexVector q = deim(basis_y);
    const IndexVector p = deim(basis_u);
    const DenseMatrix cols = sampler.col_block(q);
    const DenseMatrix rows = sampler.row_block(p);
    // targets here are formed by cancellation (residuals, iterate
    // differences); near convergence the roundoff in the slices exceeds any
    // relative intersection tolerance, so skip the consistency check
    LowRankState state = stable_cur_core(cols, rows, select_rows(cols, p), p, q);

    const Index k = state.rank();
    const bool saturated =
        k > 0 && state.sigma(0) > 0.0 && state.sigma(k - 1) > 0.01 * state.sigma(0);
    if (saturated && r_est < cap) {
      r_est = std::min(Index(2) * r_est, cap);
      continue;
    }
    const double norm = state.sigma.norm();
    return {std::move(state), norm};
  }
}

LowRankState add_states(const LowRankState& a, double w1, const LowRankState& b,
                        double w2, Index max_rank) {
  const Index ra = a.rank(), rb = b.rank();
  if (ra == 0 || rb == 0) {
    const LowRankState& keep = ra == 0 ? b : a;
    const double w = ra == 0 ? w2 : w1;
    LowRankState out = truncate_state(keep, max_rank);
    out.sigma *= std::abs(w);
    if (w < 0.0) out.U = -out.U;
    return out;
  }
  DenseMatrix u_cat(a.U.rows(), ra + rb);
  u_cat << a.U, b.U;
  DenseMatrix y_cat(a.Y.rows(), ra + rb);
  y_cat << a.Y, b.Y;

  Eigen::HouseholderQR<DenseMatrix> qru(u_cat);
  Eigen::HouseholderQR<DenseMatrix> qry(y_cat);
  const Index ku = std::min(u_cat.rows(), u_cat.cols());
  const Index ky = std::min(y_cat.rows(), y_cat.cols());
  DenseMatrix ru = qru.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  DenseMatrix ry = qry.matrixQR().topRows(ky).triangularView<Eigen::Upper>();

  Vector w(ra + rb);
  w.head(ra) = w1 * a.sigma;
  w.tail(rb) = w2 * b.sigma;
  const DenseMatrix core = ru * w.asDiagonal() * ry.transpose();
  const SvdFactors f = thin_svd(core);

  const Index r_out = std::min<Index>(max_rank, f.sigma.size());
  LowRankState s;
  s.U = DenseMatrix(qru.householderQ() * DenseMatrix::Identity(u_cat.rows(), ku)) *
        f.left.leftCols(r_out);
  s.sigma = f.sigma.head(r_out);
  s.Y = DenseMatrix(qry.householderQ() * DenseMatrix::Identity(y_cat.rows(), ky)) *
        f.right.leftCols(r_out);
  return s;
}

LowRankState truncate_state(const LowRankState& s, Index r) {
  if (r >= s.rank()) return s;
  LowRankState out;
  out.U = s.U.leftCols(r);
  out.sigma = s.sigma.head(r);
  out.Y = s.Y.leftCols(r);
  return out;
}

LowRankState augment_rank(const LowRankState& s, Index delta_r,
                          std::mt19937_64& rng) {
  const Index r = s.rank();
  const Index dr = std::min({delta_r, s.rows() - r, s.cols() - r});
  if (dr <= 0) return s;
  LowRankState out;
  out.U = extend_basis(s.U, r + dr, rng);
  out.Y = extend_basis(s.Y, r + dr, rng);
  out.sigma = Vector(r + dr);
  out.sigma.head(r) = s.sigma;
  const double seed_sigma = (r > 0 ? s.sigma(r - 1) : 1.0) * 1e-8;
  out.sigma.tail(dr).setConstant(seed_sigma);
  return out;
}

LowRankState state_from_dense(const DenseMatrix& x, Index r,
                              std::mt19937_64& rng) {
  if (r > std::min(x.rows(), x.cols()))
    throw std::invalid_argument("state_from_dense: rank exceeds matrix dimensions");
  const SvdFactors f = thin_svd(x);
  LowRankState s;
  s.U = f.left;
  s.sigma = f.sigma;
  s.Y = f.right;
  s = truncate_state(s, r);
  if (s.rank() < r) s = augment_rank(s, r - s.rank(), rng);
  return s;
}

}  // namespace curlme

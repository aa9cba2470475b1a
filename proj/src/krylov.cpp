#include "curlme/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace curlme {

DenseMatrix OperatorSide::apply_left(const DenseMatrix& x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::sparse: return sp->left_mul(x);
    case Kind::dense: return dn * x;
  }
  throw std::logic_error("OperatorSide: bad kind");
}

DenseMatrix OperatorSide::apply_right(const DenseMatrix& x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::sparse: return sp->right_mul(x);
    case Kind::dense: return x * dn;
  }
  throw std::logic_error("OperatorSide: bad kind");
}

DenseMatrix apply_operator(const LinearMatrixOperator& op, const DenseMatrix& x) {
  DenseMatrix acc = DenseMatrix::Zero(x.rows(), x.cols());
  for (const auto& [a, b] : op.terms) acc += a.apply_left(b.apply_right(x));
  if (op.hadamard) {
    if (op.hadamard->rows() != x.rows() || op.hadamard->cols() != x.cols())
      throw std::invalid_argument("apply_operator: Hadamard block shape mismatch");
    acc += op.hadamard->cwiseProduct(x);
  }
  if (op.has_mass) return op.A0.apply_left(op.B0.apply_right(x)) - op.dt * acc;
  return -op.dt * acc;
}

GmresResult gmres_lme(const LinearMatrixOperator& op, const DenseMatrix& rhs,
                      const DenseMatrix& x0, Index m, double tol,
                      int max_restarts) {
  if (m < 1) throw std::invalid_argument("gmres_lme: m must be positive");
  if (tol <= 0.0) throw std::invalid_argument("gmres_lme: tol must be positive");
  if (x0.rows() != rhs.rows() || x0.cols() != rhs.cols())
    throw std::invalid_argument("gmres_lme: x0/rhs shape mismatch");

  GmresResult result;
  result.x = x0;

  const double b_norm = rhs.norm();
  const double target = tol * (b_norm > 0.0 ? b_norm : 1.0);
  const double breakdown = 1e-14 * (b_norm > 0.0 ? b_norm : 1.0);

  std::vector<DenseMatrix> basis;
  basis.reserve(static_cast<size_t>(m) + 1);
  DenseMatrix hess = DenseMatrix::Zero(m + 1, m);
  Vector cs(m), sn(m), beta(m + 1);

  double res_norm = (rhs - apply_operator(op, result.x)).norm();
  result.stats.rel_residual = res_norm / (b_norm > 0.0 ? b_norm : 1.0);
  if (res_norm <= target) {
    result.stats.converged = true;
    return result;
  }

  for (int cycle = 0; cycle <= max_restarts; ++cycle) {
    DenseMatrix r0 = rhs - apply_operator(op, result.x);
    res_norm = r0.norm();
    if (res_norm <= target) {
      result.stats.converged = true;
      break;
    }
    if (cycle > 0) result.stats.restarts++;

    basis.clear();
    basis.push_back(r0 / res_norm);
    beta.setZero();
    beta(0) = res_norm;
    hess.setZero();

    Index k = 0;  // number of completed Arnoldi steps this cycle
    bool happy = false;
    for (Index j = 0; j < m; ++j) {
      DenseMatrix w = apply_operator(op, basis[static_cast<size_t>(j)]);
      const double pre_norm = w.norm();
      for (Index i = 0; i <= j; ++i) {
        const double h = frob_inner(basis[static_cast<size_t>(i)], w);
        hess(i, j) = h;
        w -= h * basis[static_cast<size_t>(i)];
      }
      if (w.norm() < 0.7 * pre_norm) {
        for (Index i = 0; i <= j; ++i) {
          const double h = frob_inner(basis[static_cast<size_t>(i)], w);
          hess(i, j) += h;
          w -= h * basis[static_cast<size_t>(i)];
        }
      }
      hess(j + 1, j) = w.norm();

      // previously accumulated rotations, then the new one
      for (Index i = 0; i < j; ++i) {
        const double t1 = cs(i) * hess(i, j) + sn(i) * hess(i + 1, j);
        const double t2 = -sn(i) * hess(i, j) + cs(i) * hess(i + 1, j);
        hess(i, j) = t1;
        hess(i + 1, j) = t2;
      }
      const double denom = std::hypot(hess(j, j), hess(j + 1, j));
      if (denom > 0.0) {
        cs(j) = hess(j, j) / denom;
        sn(j) = hess(j + 1, j) / denom;
      } else {
        cs(j) = 1.0;
        sn(j) = 0.0;
      }
      hess(j, j) = cs(j) * hess(j, j) + sn(j) * hess(j + 1, j);
      hess(j + 1, j) = 0.0;
      beta(j + 1) = -sn(j) * beta(j);
      beta(j) = cs(j) * beta(j);

      result.stats.iterations++;
      k = j + 1;
      res_norm = std::abs(beta(j + 1));
      result.stats.residual_history.push_back(res_norm);

      const double subdiag = w.norm();
      if (subdiag < breakdown) {
        happy = true;
        break;
      }
      basis.push_back(w / subdiag);
      if (res_norm <= target) break;
    }

    // back-substitute the rotated triangular system and update the iterate
    Vector y(k);
    for (Index i = k - 1; i >= 0; --i) {
      double s = beta(i);
      for (Index l = i + 1; l < k; ++l) s -= hess(i, l) * y(l);
      y(i) = s / hess(i, i);
    }
    for (Index i = 0; i < k; ++i) result.x += y(i) * basis[static_cast<size_t>(i)];

    if (res_norm <= target || happy) {
      res_norm = (rhs - apply_operator(op, result.x)).norm();
      if (res_norm <= target || happy) {
        result.stats.converged = res_norm <= target;
        break;
      }
    }
    if (cycle == max_restarts) break;
  }

  result.stats.rel_residual = res_norm / (b_norm > 0.0 ? b_norm : 1.0);
  if (res_norm <= target) result.stats.converged = true;
  return result;
}

}  // namespace curlme

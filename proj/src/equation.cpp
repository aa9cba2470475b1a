#include "curlme/equation.hpp"

#include <cmath>
#include <stdexcept>

namespace curlme {

DenseMatrix MatrixAccessor::to_dense() const {
  if (!valid()) throw std::logic_error("MatrixAccessor: callbacks missing");
  IndexVector all(static_cast<size_t>(cols));
  for (Index j = 0; j < cols; ++j) all[static_cast<size_t>(j)] = j;
  return col_block(all);
}

MatrixAccessor MatrixAccessor::zero(Index rows, Index cols) {
  MatrixAccessor a;
  a.rows = rows;
  a.cols = cols;
  a.norm_hint = 0.0;
  a.left_factor = std::make_shared<DenseMatrix>(DenseMatrix::Zero(rows, 0));
  a.right_factor = std::make_shared<DenseMatrix>(DenseMatrix::Zero(cols, 0));
  a.col_block = [rows](IndexSpan q) {
    return DenseMatrix(DenseMatrix::Zero(rows, static_cast<Index>(q.size())));
  };
  a.row_block = [cols](IndexSpan p) {
    return DenseMatrix(DenseMatrix::Zero(static_cast<Index>(p.size()), cols));
  };
  return a;
}

MatrixAccessor MatrixAccessor::from_dense(DenseMatrix m) {
  auto ptr = std::make_shared<DenseMatrix>(std::move(m));
  MatrixAccessor a;
  a.rows = ptr->rows();
  a.cols = ptr->cols();
  a.norm_hint = ptr->norm();
  a.col_block = [ptr](IndexSpan q) { return select_cols(*ptr, q); };
  a.row_block = [ptr](IndexSpan p) { return select_rows(*ptr, p); };
  return a;
}

MatrixAccessor MatrixAccessor::from_factors(DenseMatrix l, DenseMatrix r) {
  if (l.cols() != r.cols())
    throw std::invalid_argument("MatrixAccessor: factor rank mismatch");
  auto lp = std::make_shared<DenseMatrix>(std::move(l));
  auto rp = std::make_shared<DenseMatrix>(std::move(r));
  MatrixAccessor a;
  a.rows = lp->rows();
  a.cols = rp->rows();
  // ||L R^T||_F via small Gram matrices
  a.norm_hint = std::sqrt(std::max(
      0.0, ((lp->transpose() * *lp) * (rp->transpose() * *rp)).trace()));
  a.left_factor = lp;
  a.right_factor = rp;
  a.col_block = [lp, rp](IndexSpan q) {
    return DenseMatrix(*lp * select_rows(*rp, q).transpose());
  };
  a.row_block = [lp, rp](IndexSpan p) {
    return DenseMatrix(select_rows(*lp, p) * rp->transpose());
  };
  return a;
}

MatrixAccessor MatrixAccessor::from_state(LowRankState s) {
  DenseMatrix l = s.U * s.sigma.asDiagonal();
  return from_factors(std::move(l), s.Y);
}

MatrixAccessor accessor_sum(const MatrixAccessor& a, double wa,
                            const MatrixAccessor& b, double wb) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("accessor_sum: shape mismatch");
  if (a.left_factor && a.right_factor && b.left_factor && b.right_factor) {
    DenseMatrix l(a.rows, a.left_factor->cols() + b.left_factor->cols());
    l << wa * *a.left_factor, wb * *b.left_factor;
    DenseMatrix r(a.cols, a.right_factor->cols() + b.right_factor->cols());
    r << *a.right_factor, *b.right_factor;
    return MatrixAccessor::from_factors(std::move(l), std::move(r));
  }
  MatrixAccessor out;
  out.rows = a.rows;
  out.cols = a.cols;
  out.col_block = [a, wa, b, wb](IndexSpan q) {
    return DenseMatrix(wa * a.col_block(q) + wb * b.col_block(q));
  };
  out.row_block = [a, wa, b, wb](IndexSpan p) {
    return DenseMatrix(wa * a.row_block(p) + wb * b.row_block(p));
  };
  return out;
}

MatrixAccessor LMEProblem::rhs_at(double t) const {
  if (!C_osc) return C;
  const double w = osc_coef ? osc_coef(t) : 0.0;
  return accessor_sum(C, 1.0, *C_osc, w);
}

StepEquation make_pseudo_time_step(const LMEProblem& steady, double dtau,
                                   const LowRankState& prev) {
  if (steady.transient)
    throw std::invalid_argument("make_pseudo_time_step: problem is not steady");
  StepEquation eq;
  eq.n1 = steady.n1;
  eq.n2 = steady.n2;
  eq.has_mass = true;
  eq.A0 = OperatorSide::make_identity();
  eq.B0 = OperatorSide::make_identity();
  eq.terms = steady.terms;
  eq.hadamard = steady.hadamard;
  // steady form sum Ai X Bi + E.*X = C maps to dX/dtau = sum Ai X Bi + E.*X - C
  eq.C = steady.C;
  eq.dt = dtau;
  eq.history.emplace_back(1.0, prev);
  return eq;
}

StepEquation make_steady_direct(const LMEProblem& steady) {
  if (steady.transient)
    throw std::invalid_argument("make_steady_direct: problem is not steady");
  if (steady.terms.empty())
    throw std::invalid_argument("make_steady_direct: no product terms");
  StepEquation eq;
  eq.n1 = steady.n1;
  eq.n2 = steady.n2;
  // first product term takes the mass slot so the assembled form
  // A0 X B0 - dt*(rest) with dt = -1 equals sum_i Ai X Bi + E.*X
  eq.has_mass = true;
  eq.A0 = OperatorSide::make_sparse(steady.terms.front().first);
  eq.B0 = OperatorSide::make_sparse(steady.terms.front().second);
  eq.terms.assign(steady.terms.begin() + 1, steady.terms.end());
  eq.hadamard = steady.hadamard;
  eq.C = steady.C;
  eq.dt = -1.0;
  return eq;
}

DenseMatrix product_cols(const OperatorSide& a, const OperatorSide& b,
                         const LowRankState& x, IndexSpan q) {
  DenseMatrix xb_cols;
  switch (b.kind) {
    case OperatorSide::Kind::identity:
      xb_cols = x.col_block(q);
      break;
    case OperatorSide::Kind::sparse: {
      // [X B](:,q) = U S (B(:,q)^T Y)^T
      DenseMatrix bt_y = b.sp->cols_transpose_times(q, x.Y);  // |q| x r
      xb_cols = x.U * (x.sigma.asDiagonal() * bt_y.transpose());
      break;
    }
    case OperatorSide::Kind::dense:
      throw std::logic_error("product_cols: dense equation side");
  }
  return a.apply_left(xb_cols);
}

DenseMatrix product_rows(const OperatorSide& a, const OperatorSide& b,
                         const LowRankState& x, IndexSpan p) {
  DenseMatrix ax_rows;
  switch (a.kind) {
    case OperatorSide::Kind::identity:
      ax_rows = x.row_block(p);
      break;
    case OperatorSide::Kind::sparse: {
      DenseMatrix au = a.sp->rows_times(p, x.U);  // |p| x r
      ax_rows = (au * x.sigma.asDiagonal()) * x.Y.transpose();
      break;
    }
    case OperatorSide::Kind::dense:
      throw std::logic_error("product_rows: dense equation side");
  }
  return b.apply_right(ax_rows);
}

DenseMatrix lhs_cols(const StepEquation& eq, const LowRankState& x, IndexSpan q) {
  DenseMatrix acc =
      DenseMatrix::Zero(eq.n1, static_cast<Index>(q.size()));
  for (const auto& [a, b] : eq.terms)
    acc += product_cols(OperatorSide::make_sparse(a), OperatorSide::make_sparse(b), x, q);
  if (eq.hadamard)
    acc += eq.hadamard->col_block(q).cwiseProduct(x.col_block(q));
  if (eq.has_mass) return product_cols(eq.A0, eq.B0, x, q) - eq.dt * acc;
  return -eq.dt * acc;
}

DenseMatrix lhs_rows(const StepEquation& eq, const LowRankState& x, IndexSpan p) {
  DenseMatrix acc =
      DenseMatrix::Zero(static_cast<Index>(p.size()), eq.n2);
  for (const auto& [a, b] : eq.terms)
    acc += product_rows(OperatorSide::make_sparse(a), OperatorSide::make_sparse(b), x, p);
  if (eq.hadamard)
    acc += eq.hadamard->row_block(p).cwiseProduct(x.row_block(p));
  if (eq.has_mass) return product_rows(eq.A0, eq.B0, x, p) - eq.dt * acc;
  return -eq.dt * acc;
}

DenseMatrix rhs_cols(const StepEquation& eq, IndexSpan q) {
  DenseMatrix acc = -eq.dt * eq.C.col_block(q);
  if (eq.has_mass)
    for (const auto& [w, state] : eq.history)
      acc += w * product_cols(eq.A0, eq.B0, state, q);
  return acc;
}

DenseMatrix rhs_rows(const StepEquation& eq, IndexSpan p) {
  DenseMatrix acc = -eq.dt * eq.C.row_block(p);
  if (eq.has_mass)
    for (const auto& [w, state] : eq.history)
      acc += w * product_rows(eq.A0, eq.B0, state, p);
  return acc;
}

MatrixSampler residual_sampler(const StepEquation& eq, const LowRankState& x) {
  MatrixSampler s;
  s.rows = eq.n1;
  s.cols = eq.n2;
  s.col_block = [&eq, &x](IndexSpan q) {
    return DenseMatrix(lhs_cols(eq, x, q) - rhs_cols(eq, q));
  };
  s.row_block = [&eq, &x](IndexSpan p) {
    return DenseMatrix(lhs_rows(eq, x, p) - rhs_rows(eq, p));
  };
  return s;
}

MatrixSampler difference_sampler(const LowRankState& a, const LowRankState& b) {
  MatrixSampler s;
  s.rows = a.rows();
  s.cols = a.cols();
  s.col_block = [&a, &b](IndexSpan q) {
    return DenseMatrix(a.col_block(q) - b.col_block(q));
  };
  s.row_block = [&a, &b](IndexSpan p) {
    return DenseMatrix(a.row_block(p) - b.row_block(p));
  };
  return s;
}

namespace {

// right factor of (X B) for low-rank X: (B^T Y), so X B = U S (B^T Y)^T
DenseMatrix right_factor_through(const OperatorSide& b, const DenseMatrix& y) {
  switch (b.kind) {
    case OperatorSide::Kind::identity: return y;
    case OperatorSide::Kind::sparse: return b.sp->right_mul(y.transpose()).transpose();
    case OperatorSide::Kind::dense: break;
  }
  throw std::logic_error("right_factor_through: dense equation side");
}

}  // namespace

double rhs_norm(const StepEquation& eq, Index est_rank, std::mt19937_64& rng) {
  const bool c_factored = eq.C.left_factor && eq.C.right_factor;
  if (!eq.has_mass || eq.history.empty()) {
    if (eq.C.norm_hint >= 0.0) return std::abs(eq.dt) * eq.C.norm_hint;
  } else if (c_factored) {
    // concatenate the factored pieces and take the norm of the product
    Index k = eq.C.left_factor->cols();
    for (const auto& [w, st] : eq.history) {
      (void)w;
      k += st.rank();
    }
    DenseMatrix l(eq.n1, k), r(eq.n2, k);
    Index at = 0;
    for (const auto& [w, st] : eq.history) {
      l.middleCols(at, st.rank()) =
          w * eq.A0.apply_left(DenseMatrix(st.U * st.sigma.asDiagonal()));
      r.middleCols(at, st.rank()) = right_factor_through(eq.B0, st.Y);
      at += st.rank();
    }
    l.middleCols(at, eq.C.left_factor->cols()) = -eq.dt * *eq.C.left_factor;
    r.middleCols(at, eq.C.right_factor->cols()) = *eq.C.right_factor;
    return std::sqrt(std::max(0.0, ((l.transpose() * l) * (r.transpose() * r)).trace()));
  }

  MatrixSampler s;
  s.rows = eq.n1;
  s.cols = eq.n2;
  s.col_block = [&eq](IndexSpan q) { return rhs_cols(eq, q); };
  s.row_block = [&eq](IndexSpan p) { return rhs_rows(eq, p); };
  return lowrank_norm_estimate(s, nullptr, est_rank, rng).norm;
}

LinearMatrixOperator full_operator(const StepEquation& eq) {
  LinearMatrixOperator op;
  op.has_mass = eq.has_mass;
  op.A0 = eq.A0;
  op.B0 = eq.B0;
  for (const auto& [a, b] : eq.terms)
    op.terms.emplace_back(OperatorSide::make_sparse(a), OperatorSide::make_sparse(b));
  if (eq.hadamard) op.hadamard = eq.hadamard->to_dense();
  op.dt = eq.dt;
  return op;
}

DenseMatrix rhs_dense(const StepEquation& eq) {
  DenseMatrix acc = -eq.dt * eq.C.to_dense();
  if (eq.has_mass)
    for (const auto& [w, st] : eq.history)
      acc += w * eq.A0.apply_left(eq.B0.apply_right(st.to_dense()));
  return acc;
}

}  // namespace curlme

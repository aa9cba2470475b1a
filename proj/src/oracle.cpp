#include "curlme/oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <deque>
#include <stdexcept>

namespace curlme {
namespace oracle {

namespace {

using EigenSparse = Eigen::SparseMatrix<double>;

EigenSparse to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(m.nnz()));
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k)
      t.emplace_back(static_cast<int>(r), static_cast<int>(ci[static_cast<size_t>(k)]),
                     v[static_cast<size_t>(k)]);
  EigenSparse s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseMatrix side_sparse(const OperatorSide& s, Index n) {
  switch (s.kind) {
    case OperatorSide::Kind::identity: return SparseMatrix::identity(n);
    case OperatorSide::Kind::sparse: return *s.sp;
    case OperatorSide::Kind::dense: return SparseMatrix::from_dense(s.dn);
  }
  throw std::logic_error("side_sparse: bad kind");
}

void append_scaled(std::vector<SparseMatrix::Triplet>& acc, const SparseMatrix& m,
                   double w) {
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k)
      acc.push_back({r, ci[static_cast<size_t>(k)], w * v[static_cast<size_t>(k)]});
}

void check_cap(Index n1, Index n2, Index cap, const char* where) {
  if (n1 * n2 > cap)
    throw std::invalid_argument(std::string(where) +
                                ": n1*n2 exceeds the dense cap");
}

class SparseSolver {
 public:
  explicit SparseSolver(const SparseMatrix& m) : mat_(to_eigen(m)) {
    lu_.compute(mat_);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("sparse factorization failed (singular system?)");
  }
  Vector solve(const Vector& b) const { return lu_.solve(b); }
  DenseMatrix solve(const DenseMatrix& b) const { return lu_.solve(b); }

 private:
  EigenSparse mat_;
  Eigen::SparseLU<EigenSparse> lu_;
};

}  // namespace

Vector vec(const DenseMatrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

DenseMatrix unvec(const Vector& v, Index n1, Index n2) {
  if (v.size() != n1 * n2) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const DenseMatrix>(v.data(), n1, n2);
}

SparseMatrix kron_operator(const StepEquation& eq) {
  std::vector<SparseMatrix::Triplet> acc;
  if (eq.has_mass)
    append_scaled(acc,
                  kron_sparse(side_sparse(eq.B0, eq.n2).transposed(),
                              side_sparse(eq.A0, eq.n1)),
                  1.0);
  for (const auto& [a, b] : eq.terms)
    append_scaled(acc, kron_sparse(b->transposed(), *a), -eq.dt);
  if (eq.hadamard) {
    const DenseMatrix e = eq.hadamard->to_dense();
    for (Index j = 0; j < eq.n2; ++j)
      for (Index i = 0; i < eq.n1; ++i)
        acc.push_back({j * eq.n1 + i, j * eq.n1 + i, -eq.dt * e(i, j)});
  }
  return SparseMatrix::from_triplets(eq.n1 * eq.n2, eq.n1 * eq.n2, std::move(acc));
}

KroneckerSystem kron_assemble(const StepEquation& eq, Index cap) {
  check_cap(eq.n1, eq.n2, cap, "kron_assemble");
  KroneckerSystem sys;
  sys.A = kron_operator(eq).to_dense();
  sys.b = vec(rhs_dense(eq));
  if (!sys.A.allFinite() || !sys.b.allFinite())
    throw std::runtime_error("kron_assemble: non-finite assembly");
  return sys;
}

DenseMatrix fom_solve(const StepEquation& eq, Index cap) {
  check_cap(eq.n1, eq.n2, cap, "fom_solve");
  const SparseMatrix a = kron_operator(eq);
  const SparseSolver lu(a);
  const Vector b = vec(rhs_dense(eq));
  const Vector x = lu.solve(b);
  const double scale = b.norm() > 0.0 ? b.norm() : 1.0;
  const double res = (b - a.left_mul(x)).norm() / scale;
  if (res > 1e-10)
    throw std::runtime_error("fom_solve: direct solve residual " +
                             std::to_string(res) + " above 1e-10");
  return unvec(x, eq.n1, eq.n2);
}

LowRankState best_rank_r(const DenseMatrix& x, Index r) {
  if (r > std::min(x.rows(), x.cols()))
    throw std::invalid_argument("best_rank_r: rank exceeds dimensions");
  const SvdFactors f = thin_svd(x);
  LowRankState s;
  s.U = f.left.leftCols(r);
  s.sigma = f.sigma.head(r);
  s.Y = f.right.leftCols(r);
  return s;
}

namespace {

DenseMatrix apply_problem_rhs_terms(const LMEProblem& p, const DenseMatrix& x,
                                    const DenseMatrix& c_dense) {
  DenseMatrix acc = -c_dense;
  for (const auto& [a, b] : p.terms) acc += a->left_mul(b->right_mul(x));
  if (p.hadamard) acc += p.hadamard->to_dense().cwiseProduct(x);
  return acc;
}

}  // namespace

DenseMatrix fom_transient(const LMEProblem& problem, TimeScheme scheme,
                          double dt, int n_steps, const DenseMatrix& x0,
                          Index cap) {
  check_cap(problem.n1, problem.n2, cap, "fom_transient");
  if (!problem.transient)
    throw std::invalid_argument("fom_transient: problem is not transient");

  const DenseMatrix c_dense = problem.C.to_dense();
  const DenseMatrix c_osc =
      problem.C_osc ? problem.C_osc->to_dense()
                    : DenseMatrix::Zero(problem.n1, problem.n2);
  auto c_at = [&](double t) {
    if (!problem.C_osc) return c_dense;
    return DenseMatrix(c_dense + problem.osc_coef(t) * c_osc);
  };
  const SparseMatrix a0 = side_sparse(problem.A0, problem.n1);
  const SparseMatrix b0 = side_sparse(problem.B0, problem.n2);

  // one factorized operator per effective scheme (bootstrap uses lower orders)
  auto build = [&](TimeScheme s) {
    StepEquation eq;
    eq.n1 = problem.n1;
    eq.n2 = problem.n2;
    eq.has_mass = true;
    eq.A0 = problem.A0;
    eq.B0 = problem.B0;
    eq.terms = problem.terms;
    eq.hadamard = problem.hadamard;
    eq.C = problem.C;
    switch (s) {
      case TimeScheme::euler: eq.dt = dt; break;
      case TimeScheme::bdf2: eq.dt = 2.0 * dt / 3.0; break;
      case TimeScheme::bdf3: eq.dt = 6.0 * dt / 11.0; break;
    }
    return std::make_unique<SparseSolver>(kron_operator(eq));
  };

  std::unique_ptr<SparseSolver> solvers[3];
  const int order = scheme_order(scheme);

  std::deque<DenseMatrix> hist{x0};
  for (int step = 1; step <= n_steps; ++step) {
    const int avail = static_cast<int>(hist.size());
    TimeScheme eff = scheme;
    if (order >= 2 && avail < 2) eff = TimeScheme::euler;
    else if (order >= 3 && avail < 3) eff = TimeScheme::bdf2;
    const int ei = scheme_order(eff) - 1;
    if (!solvers[ei]) solvers[ei] = build(eff);

    DenseMatrix xh;
    double dt_eff = dt;
    switch (eff) {
      case TimeScheme::euler:
        xh = hist[0];
        dt_eff = dt;
        break;
      case TimeScheme::bdf2:
        xh = (4.0 / 3.0) * hist[0] - (1.0 / 3.0) * hist[1];
        dt_eff = 2.0 * dt / 3.0;
        break;
      case TimeScheme::bdf3:
        xh = (18.0 / 11.0) * hist[0] - (9.0 / 11.0) * hist[1] + (2.0 / 11.0) * hist[2];
        dt_eff = 6.0 * dt / 11.0;
        break;
    }
    const DenseMatrix rhs = a0.left_mul(b0.right_mul(xh)) -
                            dt_eff * c_at(static_cast<double>(step) * dt);
    const Vector x = solvers[ei]->solve(vec(rhs));
    hist.push_front(unvec(x, problem.n1, problem.n2));
    while (hist.size() > 3) hist.pop_back();
  }
  return hist.front();
}

DenseMatrix rk4_reference(const LMEProblem& problem, double dt, int n_steps,
                          const DenseMatrix& x0, Index cap) {
  check_cap(problem.n1, problem.n2, cap, "rk4_reference");
  const DenseMatrix c_dense = problem.C.to_dense();
  const DenseMatrix c_osc =
      problem.C_osc ? problem.C_osc->to_dense()
                    : DenseMatrix::Zero(problem.n1, problem.n2);

  std::unique_ptr<SparseSolver> a0_lu, b0t_lu;
  if (!problem.A0.is_identity())
    a0_lu = std::make_unique<SparseSolver>(side_sparse(problem.A0, problem.n1));
  if (!problem.B0.is_identity())
    b0t_lu = std::make_unique<SparseSolver>(
        side_sparse(problem.B0, problem.n2).transposed());

  auto f = [&](const DenseMatrix& x, double t) {
    DenseMatrix c = c_dense;
    if (problem.C_osc) c += problem.osc_coef(t) * c_osc;
    DenseMatrix rhs = apply_problem_rhs_terms(problem, x, c);
    if (a0_lu) rhs = a0_lu->solve(rhs);
    if (b0t_lu) rhs = b0t_lu->solve(DenseMatrix(rhs.transpose())).transpose();
    return rhs;
  };

  DenseMatrix x = x0;
  for (int step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    const DenseMatrix k1 = f(x, t);
    const DenseMatrix k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt);
    const DenseMatrix k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt);
    const DenseMatrix k4 = f(x + dt * k3, t + dt);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

DenseMatrix fom_steady(const LMEProblem& steady, Index cap) {
  if (steady.transient)
    throw std::invalid_argument("fom_steady: problem is not steady");
  return fom_solve(make_steady_direct(steady), cap);
}

NewtonTrace fom_newton(const NonlinearProblem& problem, const DenseMatrix& x0,
                       double tol, int max_iters, Index cap) {
  check_cap(problem.n1, problem.n2, cap, "fom_newton");
  std::mt19937_64 rng(0);

  NewtonTrace out;
  out.x = x0;
  const Index full_rank = std::min(problem.n1, problem.n2);

  std::vector<SparseMatrix::Triplet> base;
  for (const auto& [a, b] : problem.terms)
    append_scaled(base, kron_sparse(b->transposed(), *a), 1.0);

  double prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= max_iters; ++it) {
    const LowRankState xs = state_from_dense(out.x, full_rank, rng);
    const DenseMatrix r = problem.residual(xs).to_dense();
    const DenseMatrix e = problem.jacobian_hadamard(xs).to_dense();

    std::vector<SparseMatrix::Triplet> acc = base;
    for (Index j = 0; j < problem.n2; ++j)
      for (Index i = 0; i < problem.n1; ++i)
        acc.push_back({j * problem.n1 + i, j * problem.n1 + i, e(i, j)});
    const SparseMatrix jac = SparseMatrix::from_triplets(
        problem.n1 * problem.n2, problem.n1 * problem.n2, std::move(acc));

    const SparseSolver lu(jac);
    const Vector delta = lu.solve(Vector(-vec(r)));
    const double dn = delta.norm();
    out.delta_norms.push_back(dn);
    out.x += unvec(delta, problem.n1, problem.n2);

    if (dn <= tol) {
      out.converged = true;
      return out;
    }
    growth = dn > prev ? growth + 1 : 0;
    if (growth >= 3) return out;
    prev = dn;
  }
  return out;
}

GmresResult scalar_gmres(const DenseMatrix& a, const Vector& b,
                         const Vector& x0, Index m, double tol,
                         int max_restarts) {
  // standalone vector implementation, kept independent of gmres_lme so the
  // two formulations cross-check each other
  GmresResult result;
  result.x = x0;
  const double b_norm = b.norm();
  const double target = tol * (b_norm > 0.0 ? b_norm : 1.0);
  const double breakdown = 1e-14 * (b_norm > 0.0 ? b_norm : 1.0);

  DenseMatrix basis(b.size(), m + 1);
  DenseMatrix hess = DenseMatrix::Zero(m + 1, m);
  Vector cs(m), sn(m), beta(m + 1);

  double res_norm = (b - a * result.x).norm();
  if (res_norm <= target) {
    result.stats.converged = true;
    result.stats.rel_residual = res_norm / (b_norm > 0.0 ? b_norm : 1.0);
    return result;
  }

  for (int cycle = 0; cycle <= max_restarts; ++cycle) {
    Vector r0 = b - a * Vector(result.x);
    res_norm = r0.norm();
    if (res_norm <= target) {
      result.stats.converged = true;
      break;
    }
    if (cycle > 0) result.stats.restarts++;

    basis.col(0) = r0 / res_norm;
    beta.setZero();
    beta(0) = res_norm;
    hess.setZero();

    Index k = 0;
    bool happy = false;
    for (Index j = 0; j < m; ++j) {
      Vector w = a * Vector(basis.col(j));
      const double pre_norm = w.norm();
      for (Index i = 0; i <= j; ++i) {
        const double h = basis.col(i).dot(w);
        hess(i, j) = h;
        w -= h * basis.col(i);
      }
      if (w.norm() < 0.7 * pre_norm) {
        for (Index i = 0; i <= j; ++i) {
          const double h = basis.col(i).dot(w);
          hess(i, j) += h;
          w -= h * basis.col(i);
        }
      }
      hess(j + 1, j) = w.norm();

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
      basis.col(j + 1) = w / subdiag;
      if (res_norm <= target) break;
    }

    Vector y(k);
    for (Index i = k - 1; i >= 0; --i) {
      double s = beta(i);
      for (Index l = i + 1; l < k; ++l) s -= hess(i, l) * y(l);
      y(i) = s / hess(i, i);
    }
    Vector xv = result.x;
    for (Index i = 0; i < k; ++i) xv += y(i) * basis.col(i);
    result.x = xv;

    if (res_norm <= target || happy) {
      res_norm = (b - a * Vector(result.x)).norm();
      if (res_norm <= target || happy) {
        result.stats.converged = res_norm <= target;
        break;
      }
    }
  }
  result.stats.rel_residual = res_norm / (b_norm > 0.0 ? b_norm : 1.0);
  if (res_norm <= target) result.stats.converged = true;
  return result;
}

}  // namespace oracle
}  // namespace curlme

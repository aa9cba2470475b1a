#include "curlme/problems.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace curlme {

Fem1D fem_1d(Index n_elements, double length) {
  if (n_elements < 2) throw std::invalid_argument("fem_1d: need at least 2 elements");
  if (length <= 0.0) throw std::invalid_argument("fem_1d: length must be positive");
  Fem1D f;
  f.n_nodes = n_elements + 1;
  f.h = length / static_cast<double>(n_elements);

  std::vector<SparseMatrix::Triplet> mt, kt;
  for (Index e = 0; e < n_elements; ++e) {
    const Index a = e, b = e + 1;
    // element matrices for linear hats: M_e = h/6 [2 1; 1 2], K_e = 1/h [1 -1; -1 1]
    mt.push_back({a, a, 2.0 * f.h / 6.0});
    mt.push_back({b, b, 2.0 * f.h / 6.0});
    mt.push_back({a, b, f.h / 6.0});
    mt.push_back({b, a, f.h / 6.0});
    kt.push_back({a, a, 1.0 / f.h});
    kt.push_back({b, b, 1.0 / f.h});
    kt.push_back({a, b, -1.0 / f.h});
    kt.push_back({b, a, -1.0 / f.h});
  }
  f.M = SparseMatrix::from_triplets(f.n_nodes, f.n_nodes, std::move(mt));
  f.K = SparseMatrix::from_triplets(f.n_nodes, f.n_nodes, std::move(kt));
  return f;
}

SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(static_cast<size_t>(a.nnz()) * static_cast<size_t>(b.nnz()));
  const auto& arp = a.row_offsets();
  const auto& aci = a.column_indices();
  const auto& av = a.values();
  const auto& brp = b.row_offsets();
  const auto& bci = b.column_indices();
  const auto& bv = b.values();
  for (Index ar = 0; ar < a.rows(); ++ar)
    for (Index ak = arp[ar]; ak < arp[ar + 1]; ++ak)
      for (Index br = 0; br < b.rows(); ++br)
        for (Index bk = brp[br]; bk < brp[br + 1]; ++bk)
          t.push_back({ar * b.rows() + br,
                       aci[static_cast<size_t>(ak)] * b.cols() + bci[static_cast<size_t>(bk)],
                       av[static_cast<size_t>(ak)] * bv[static_cast<size_t>(bk)]});
  return SparseMatrix::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(),
                                     std::move(t));
}

namespace {

SparseMatrix scaled(const SparseMatrix& m, double a) {
  SparseMatrix out = m;
  out.scale(a);
  return out;
}

SparseMatrix sparse_sum(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("sparse_sum: shape mismatch");
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(static_cast<size_t>(a.nnz() + b.nnz()));
  for (const SparseMatrix* m : {&a, &b}) {
    const auto& rp = m->row_offsets();
    const auto& ci = m->column_indices();
    const auto& v = m->values();
    for (Index r = 0; r < m->rows(); ++r)
      for (Index k = rp[r]; k < rp[r + 1]; ++k)
        t.push_back({r, ci[static_cast<size_t>(k)], v[static_cast<size_t>(k)]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix sparse_block(const SparseMatrix& m, IndexSpan rows, IndexSpan cols) {
  std::vector<Index> col_slot(static_cast<size_t>(m.cols()), -1);
  for (size_t j = 0; j < cols.size(); ++j)
    col_slot[static_cast<size_t>(cols[j])] = static_cast<Index>(j);
  std::vector<SparseMatrix::Triplet> t;
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      const Index slot = col_slot[static_cast<size_t>(ci[static_cast<size_t>(k)])];
      if (slot >= 0)
        t.push_back({static_cast<Index>(i), slot, v[static_cast<size_t>(k)]});
    }
  }
  return SparseMatrix::from_triplets(static_cast<Index>(rows.size()),
                                     static_cast<Index>(cols.size()), std::move(t));
}

// m(rows, cols) * ones
Vector block_row_sums(const SparseMatrix& m, IndexSpan rows, IndexSpan cols) {
  std::vector<char> in_cols(static_cast<size_t>(m.cols()), 0);
  for (Index c : cols) in_cols[static_cast<size_t>(c)] = 1;
  Vector out = Vector::Zero(static_cast<Index>(rows.size()));
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    for (Index k = rp[r]; k < rp[r + 1]; ++k)
      if (in_cols[static_cast<size_t>(ci[static_cast<size_t>(k)])])
        out(static_cast<Index>(i)) += v[static_cast<size_t>(k)];
  }
  return out;
}

// ones^T * m(rows, cols), as a column vector of length |cols|
Vector block_col_sums(const SparseMatrix& m, IndexSpan rows, IndexSpan cols) {
  std::vector<Index> col_slot(static_cast<size_t>(m.cols()), -1);
  for (size_t j = 0; j < cols.size(); ++j)
    col_slot[static_cast<size_t>(cols[j])] = static_cast<Index>(j);
  Vector out = Vector::Zero(static_cast<Index>(cols.size()));
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r : rows) {
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      const Index slot = col_slot[static_cast<size_t>(ci[static_cast<size_t>(k)])];
      if (slot >= 0) out(slot) += v[static_cast<size_t>(k)];
    }
  }
  return out;
}

IndexVector all_indices(Index n) {
  IndexVector v(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
  return v;
}

// rank-1 state c * ones * ones^T
LowRankState constant_state(Index n1, Index n2, double c) {
  LowRankState s;
  s.U = DenseMatrix::Constant(n1, 1, 1.0 / std::sqrt(static_cast<double>(n1)));
  s.Y = DenseMatrix::Constant(n2, 1, 1.0 / std::sqrt(static_cast<double>(n2)));
  s.sigma = Vector::Constant(1, std::abs(c) * std::sqrt(static_cast<double>(n1) *
                                                        static_cast<double>(n2)));
  if (c < 0.0) s.U = -s.U;
  return s;
}

AxisSplit axis_split_1d(Index n_nodes) {
  AxisSplit s;
  for (Index i = 0; i < n_nodes; ++i) {
    if (i == 0 || i == n_nodes - 1)
      s.boundary.push_back(i);
    else
      s.interior.push_back(i);
  }
  return s;
}

// tensor-product plane of two 1-D grids, node (ix, iy) -> ix*ny_nodes + iy
AxisSplit plane_split(Index nx_nodes, Index ny_nodes) {
  AxisSplit s;
  for (Index ix = 0; ix < nx_nodes; ++ix)
    for (Index iy = 0; iy < ny_nodes; ++iy) {
      const Index id = ix * ny_nodes + iy;
      if (ix == 0 || ix == nx_nodes - 1 || iy == 0 || iy == ny_nodes - 1)
        s.boundary.push_back(id);
      else
        s.interior.push_back(id);
    }
  return s;
}

// builds the transient interior problem from full-grid factor operators;
// rows ("a") carry rho*cp on the mass and -k on the stiffness
HeatMde assemble_heat_generic(SparseMatrix ma, SparseMatrix ka, AxisSplit sa,
                              SparseMatrix mb, SparseMatrix kb, AxisSplit sb,
                              double rho, double cp, double k, double source,
                              double t0, double bc) {
  HeatMde h;
  h.Ma_full = std::move(ma);
  h.Ka_full = std::move(ka);
  h.Mb_full = std::move(mb);
  h.Kb_full = std::move(kb);
  h.a_split = std::move(sa);
  h.b_split = std::move(sb);
  h.rho_cp = rho * cp;
  h.conductivity = k;
  h.source = source;
  h.t_initial = t0;
  h.boundary_value = bc;

  const IndexVector& ia = h.a_split.interior;
  const IndexVector& ib = h.b_split.interior;
  const IndexVector& ba = h.a_split.boundary;
  const IndexVector& bb = h.b_split.boundary;
  const Index n1 = static_cast<Index>(ia.size());
  const Index n2 = static_cast<Index>(ib.size());

  // full-grid term operators with physical factors folded in
  const SparseMatrix a1_full = scaled(h.Ka_full, -k);
  const SparseMatrix& b1_full = h.Mb_full;
  const SparseMatrix& a2_full = h.Ma_full;
  const SparseMatrix b2_full = scaled(h.Kb_full, -k);

  LMEProblem& p = h.problem;
  p.n1 = n1;
  p.n2 = n2;
  p.transient = true;
  p.A0 = OperatorSide::make_sparse(std::make_shared<SparseMatrix>(
      scaled(sparse_block(h.Ma_full, ia, ia), h.rho_cp)));
  p.B0 = OperatorSide::make_sparse(
      std::make_shared<SparseMatrix>(sparse_block(h.Mb_full, ib, ib)));
  p.terms.emplace_back(std::make_shared<SparseMatrix>(sparse_block(a1_full, ia, ia)),
                       std::make_shared<SparseMatrix>(sparse_block(b1_full, ib, ib)));
  p.terms.emplace_back(std::make_shared<SparseMatrix>(sparse_block(a2_full, ia, ia)),
                       std::make_shared<SparseMatrix>(sparse_block(b2_full, ib, ib)));

  // Dirichlet data and the volumetric source enter through C (rank <= 5):
  // for each term, the boundary-row block against held values plus the
  // boundary-column block against held values
  const IndexVector aa = all_indices(h.Ma_full.rows());
  const IndexVector ab = all_indices(h.Mb_full.rows());
  DenseMatrix lfac(n1, 5), rfac(n2, 5);
  int col = 0;
  for (const auto* term : {&a1_full, &a2_full}) {
    const SparseMatrix& bmat = term == &a1_full ? b1_full : b2_full;
    lfac.col(col) = bc * block_row_sums(*term, ia, ba);
    rfac.col(col) = block_col_sums(bmat, ib, ib);
    ++col;
    lfac.col(col) = bc * block_row_sums(*term, ia, aa);
    rfac.col(col) = block_col_sums(bmat, bb, ib);
    ++col;
  }
  lfac.col(col) = source * block_row_sums(h.Ma_full, ia, aa);
  rfac.col(col) = block_row_sums(h.Mb_full, ib, ab);
  // dX/dt form keeps C on the right with a minus sign
  p.C = MatrixAccessor::from_factors(-lfac, rfac);

  h.x0 = constant_state(n1, n2, t0);
  return h;
}

}  // namespace

HeatMde assemble_heat_2d(Index nx, Index ny, double lx, double ly, double rho,
                         double cp, double k, double source, double t0,
                         double boundary_value) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("assemble_heat_2d: grid too small");
  Fem1D fx = fem_1d(nx, lx);
  Fem1D fy = fem_1d(ny, ly);
  return assemble_heat_generic(fx.M, fx.K, axis_split_1d(fx.n_nodes), fy.M, fy.K,
                               axis_split_1d(fy.n_nodes), rho, cp, k, source, t0,
                               boundary_value);
}

HeatMde assemble_heat_3d(Index nx, Index ny, Index nz, double lx, double ly,
                         double lz, double rho, double cp, double k,
                         double source, double t0, double boundary_value) {
  if (nx < 3 || ny < 3 || nz < 3)
    throw std::invalid_argument("assemble_heat_3d: grid too small");
  Fem1D fx = fem_1d(nx, lx);
  Fem1D fy = fem_1d(ny, ly);
  Fem1D fz = fem_1d(nz, lz);
  SparseMatrix mxy = kron_sparse(fx.M, fy.M);
  SparseMatrix kxy = sparse_sum(kron_sparse(fx.K, fy.M), kron_sparse(fx.M, fy.K));
  return assemble_heat_generic(std::move(mxy), std::move(kxy),
                               plane_split(fx.n_nodes, fy.n_nodes), fz.M, fz.K,
                               axis_split_1d(fz.n_nodes), rho, cp, k, source, t0,
                               boundary_value);
}

int scheme_order(TimeScheme s) {
  switch (s) {
    case TimeScheme::euler: return 1;
    case TimeScheme::bdf2: return 2;
    case TimeScheme::bdf3: return 3;
  }
  throw std::logic_error("scheme_order: bad scheme");
}

TimeScheme parse_scheme(const std::string& name) {
  if (name == "euler") return TimeScheme::euler;
  if (name == "bdf2") return TimeScheme::bdf2;
  if (name == "bdf3") return TimeScheme::bdf3;
  throw std::invalid_argument("unknown scheme: " + name);
}

StepEquation time_discretize(const LMEProblem& problem, TimeScheme scheme,
                             double dt, std::span<const LowRankState> history,
                             double t_new) {
  if (!problem.transient)
    throw std::invalid_argument("time_discretize: problem is not transient");
  if (dt <= 0.0) throw std::invalid_argument("time_discretize: dt must be positive");
  const int order = scheme_order(scheme);
  if (static_cast<int>(history.size()) < order)
    throw std::invalid_argument("time_discretize: insufficient history for scheme");

  StepEquation eq;
  eq.n1 = problem.n1;
  eq.n2 = problem.n2;
  eq.has_mass = true;
  eq.A0 = problem.A0;
  eq.B0 = problem.B0;
  eq.terms = problem.terms;
  eq.hadamard = problem.hadamard;
  eq.C = problem.rhs_at(t_new);

  switch (scheme) {
    case TimeScheme::euler:
      eq.dt = dt;
      eq.history.emplace_back(1.0, history[0]);
      break;
    case TimeScheme::bdf2:
      eq.dt = 2.0 * dt / 3.0;
      eq.history.emplace_back(4.0 / 3.0, history[0]);
      eq.history.emplace_back(-1.0 / 3.0, history[1]);
      break;
    case TimeScheme::bdf3:
      eq.dt = 6.0 * dt / 11.0;
      eq.history.emplace_back(18.0 / 11.0, history[0]);
      eq.history.emplace_back(-9.0 / 11.0, history[1]);
      eq.history.emplace_back(2.0 / 11.0, history[2]);
      break;
  }
  return eq;
}

TransientResult transient_solve(const LMEProblem& problem,
                                const LowRankState& x0, TimeScheme scheme,
                                double dt, int n_steps,
                                const SolverConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  EstimatorState est;

  TransientResult result;
  result.state = x0;
  const Index rank = std::min({cfg.rank, problem.n1, problem.n2});
  if (result.state.rank() > rank)
    result.state = truncate_state(result.state, rank);
  else if (result.state.rank() < rank)
    result.state = augment_rank(result.state, rank - result.state.rank(), rng);

  std::deque<LowRankState> history{result.state};
  const int order = scheme_order(scheme);

  for (int step = 1; step <= n_steps; ++step) {
    // bootstrap: lower-order steps until enough history exists
    const int avail = static_cast<int>(history.size());
    TimeScheme eff = scheme;
    if (order >= 2 && avail < 2) eff = TimeScheme::euler;
    else if (order >= 3 && avail < 3) eff = TimeScheme::bdf2;

    std::vector<LowRankState> hist(history.begin(),
                                   history.begin() + scheme_order(eff));
    const StepEquation eq =
        time_discretize(problem, eff, dt, hist, static_cast<double>(step) * dt);
    SolveResult sr = tdb_cur_solve(eq, result.state, cfg, rng, est, step);

    result.state = sr.state;
    result.converged = result.converged && (cfg.adapt_rank ? sr.converged : true);
    result.gmres_iterations += sr.gmres_iterations;
    result.gmres_restarts += sr.gmres_restarts;
    result.total_sweeps += sr.total_sweeps;
    result.sweeps_per_step.push_back(sr.total_sweeps);
    for (TraceRow& row : sr.trace) result.trace.push_back(std::move(row));

    history.push_front(result.state);
    while (history.size() > 3) history.pop_back();
  }
  return result;
}

LyapunovProblem assemble_lyapunov(Index nx, Index ny, double lx, double ly,
                                  double rho, double cp, double k) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("assemble_lyapunov: grid too small");
  Fem1D fx = fem_1d(nx, lx);
  Fem1D fy = fem_1d(ny, ly);
  const SparseMatrix m_full = scaled(kron_sparse(fx.M, fy.M), rho * cp);
  const SparseMatrix k_full =
      scaled(sparse_sum(kron_sparse(fx.K, fy.M), kron_sparse(fx.M, fy.K)), -k);
  const AxisSplit split = plane_split(fx.n_nodes, fy.n_nodes);

  LyapunovProblem lp;
  lp.K_ii = std::make_shared<SparseMatrix>(
      sparse_block(k_full, split.interior, split.interior));
  lp.M_ii = std::make_shared<SparseMatrix>(
      sparse_block(m_full, split.interior, split.interior));
  lp.g = block_row_sums(k_full, split.interior, split.boundary);

  LMEProblem& p = lp.problem;
  p.n1 = p.n2 = static_cast<Index>(split.interior.size());
  p.transient = false;
  p.terms.emplace_back(lp.K_ii, lp.M_ii);
  p.terms.emplace_back(lp.M_ii, lp.K_ii);
  // K X M + M X K + g g^T = 0  ->  sum terms = C with C = -g g^T
  DenseMatrix l = -lp.g, r = lp.g;
  p.C = MatrixAccessor::from_factors(std::move(l), std::move(r));
  return lp;
}

RadiationProblem assemble_radiation(Index nx, Index ny, Index nz, double lx,
                                    double ly, double lz, double emissivity,
                                    double sigma_sb, double t_ambient,
                                    double dirichlet_value) {
  if (nx < 3 || ny < 3 || nz < 3)
    throw std::invalid_argument("assemble_radiation: grid too small");
  Fem1D fx = fem_1d(nx, lx);
  Fem1D fy = fem_1d(ny, ly);
  Fem1D fz = fem_1d(nz, lz);

  const SparseMatrix mxy = kron_sparse(fx.M, fy.M);
  const SparseMatrix kxy =
      sparse_sum(kron_sparse(fx.K, fy.M), kron_sparse(fx.M, fy.K));

  // free plane dofs: interior plus the radiating x = lx edge (corners stay
  // clamped); everything else is Dirichlet
  AxisSplit plane;
  IndexVector radiating;
  for (Index ix = 0; ix < fx.n_nodes; ++ix)
    for (Index iy = 0; iy < fy.n_nodes; ++iy) {
      const Index id = ix * fy.n_nodes + iy;
      const bool rad_edge = ix == fx.n_nodes - 1 && iy > 0 && iy < fy.n_nodes - 1;
      const bool clamped = !rad_edge && (ix == 0 || ix == fx.n_nodes - 1 ||
                                         iy == 0 || iy == fy.n_nodes - 1);
      if (clamped) {
        plane.boundary.push_back(id);
      } else {
        if (rad_edge) radiating.push_back(static_cast<Index>(plane.interior.size()));
        plane.interior.push_back(id);
      }
    }
  const AxisSplit zsplit = axis_split_1d(fz.n_nodes);

  RadiationProblem rp;
  rp.n1 = static_cast<Index>(plane.interior.size());
  rp.n2 = static_cast<Index>(zsplit.interior.size());
  rp.emissivity = emissivity;
  rp.sigma_sb = sigma_sb;
  rp.t_ambient = t_ambient;
  rp.dirichlet_value = dirichlet_value;

  rp.radiating_mask = Vector::Zero(rp.n1);
  for (Index i : radiating) rp.radiating_mask(i) = 1.0;

  auto a1 = std::make_shared<SparseMatrix>(
      sparse_block(kxy, plane.interior, plane.interior));
  auto b1 = std::make_shared<SparseMatrix>(
      sparse_block(fz.M, zsplit.interior, zsplit.interior));
  auto a2 = std::make_shared<SparseMatrix>(
      sparse_block(mxy, plane.interior, plane.interior));
  auto b2 = std::make_shared<SparseMatrix>(
      sparse_block(fz.K, zsplit.interior, zsplit.interior));

  // Dirichlet elimination: K T Mz + M T Kz on free rows against held values
  const IndexVector aa = all_indices(mxy.rows());
  DenseMatrix lfac(rp.n1, 4), rfac(rp.n2, 4);
  lfac.col(0) = dirichlet_value * block_row_sums(kxy, plane.interior, plane.boundary);
  rfac.col(0) = block_col_sums(fz.M, zsplit.interior, zsplit.interior);
  lfac.col(1) = dirichlet_value * block_row_sums(kxy, plane.interior, aa);
  rfac.col(1) = block_col_sums(fz.M, zsplit.boundary, zsplit.interior);
  lfac.col(2) = dirichlet_value * block_row_sums(mxy, plane.interior, plane.boundary);
  rfac.col(2) = block_col_sums(fz.K, zsplit.interior, zsplit.interior);
  lfac.col(3) = dirichlet_value * block_row_sums(mxy, plane.interior, aa);
  rfac.col(3) = block_col_sums(fz.K, zsplit.boundary, zsplit.interior);
  MatrixAccessor dirichlet = MatrixAccessor::from_factors(-lfac, rfac);

  LMEProblem& lin = rp.linear_part;
  lin.n1 = rp.n1;
  lin.n2 = rp.n2;
  lin.transient = false;
  lin.terms.emplace_back(a1, b1);
  lin.terms.emplace_back(a2, b2);
  lin.C = dirichlet;

  NonlinearProblem& nl = rp.nonlinear;
  nl.n1 = rp.n1;
  nl.n2 = rp.n2;
  nl.terms = lin.terms;

  const double rad_coef = emissivity * sigma_sb;
  const double t_inf4 = std::pow(t_ambient, 4);
  const Vector mask = rp.radiating_mask;
  const Index n1 = rp.n1, n2 = rp.n2;
  const auto lin_terms = lin.terms;

  nl.residual = [lin_terms, dirichlet, mask, rad_coef, t_inf4, n1, n2](
                    const LowRankState& x) {
    MatrixAccessor a;
    a.rows = n1;
    a.cols = n2;
    a.col_block = [lin_terms, dirichlet, mask, rad_coef, t_inf4, x](IndexSpan q) {
      DenseMatrix out = -dirichlet.col_block(q);
      for (const auto& [ta, tb] : lin_terms)
        out += product_cols(OperatorSide::make_sparse(ta),
                            OperatorSide::make_sparse(tb), x, q);
      const DenseMatrix xq = x.col_block(q);
      out += rad_coef *
             (mask.asDiagonal() * (xq.array().pow(4) - t_inf4).matrix());
      return out;
    };
    a.row_block = [lin_terms, dirichlet, mask, rad_coef, t_inf4, x](IndexSpan p) {
      DenseMatrix out = -dirichlet.row_block(p);
      for (const auto& [ta, tb] : lin_terms)
        out += product_rows(OperatorSide::make_sparse(ta),
                            OperatorSide::make_sparse(tb), x, p);
      const DenseMatrix xp = x.row_block(p);
      Vector mp(static_cast<Index>(p.size()));
      for (size_t i = 0; i < p.size(); ++i) mp(static_cast<Index>(i)) = mask(p[i]);
      out += rad_coef * (mp.asDiagonal() * (xp.array().pow(4) - t_inf4).matrix());
      return out;
    };
    return a;
  };

  nl.jacobian_hadamard = [mask, rad_coef, n1, n2](const LowRankState& x) {
    MatrixAccessor a;
    a.rows = n1;
    a.cols = n2;
    a.col_block = [mask, rad_coef, x](IndexSpan q) {
      const DenseMatrix xq = x.col_block(q);
      return DenseMatrix(4.0 * rad_coef *
                         (mask.asDiagonal() * xq.array().pow(3).matrix()));
    };
    a.row_block = [mask, rad_coef, x](IndexSpan p) {
      const DenseMatrix xp = x.row_block(p);
      Vector mp(static_cast<Index>(p.size()));
      for (size_t i = 0; i < p.size(); ++i) mp(static_cast<Index>(i)) = mask(p[i]);
      return DenseMatrix(4.0 * rad_coef *
                         (mp.asDiagonal() * xp.array().pow(3).matrix()));
    };
    return a;
  };

  rp.x0 = constant_state(rp.n1, rp.n2, dirichlet_value);
  return rp;
}

}  // namespace curlme

#include "curlme/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace curlme {

double pseudo_time_step(int k, const SolverConfig& cfg) {
  if (k < 1) throw std::invalid_argument("pseudo_time_step: k >= 1 required");
  if (cfg.fixed_dtau > 0.0) return cfg.fixed_dtau;
  return 1.0 + cfg.dtau_max * (1.0 - std::exp(-(static_cast<double>(k) - 1.0) / cfg.a_ramp));
}

namespace {

// dagger solve with an explicit conditioning check so a degenerate
// interpolation block is reported rather than silently regularized
DenseMatrix checked_pseudo_solve(const DenseMatrix& block, const DenseMatrix& rhs,
                                 const char* which) {
  Eigen::JacobiSVD<DenseMatrix> svd(block);
  const Vector& s = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(block.rows(), block.cols())) *
                        std::numeric_limits<double>::epsilon() *
                        (s.size() > 0 ? s(0) : 0.0);
  if (s.size() == 0 || s(s.size() - 1) <= cutoff)
    throw std::runtime_error(std::string("build_projections: singular interpolation block ") + which);
  return pseudo_solve(block, rhs);
}

IndexVector sorted_copy(IndexSpan v) {
  IndexVector out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ProjectedSubproblem build_projections(const StepEquation& eq,
                                      const LowRankState& state, IndexSpan p,
                                      IndexSpan q) {
  std::vector<std::pair<const OperatorSide*, const OperatorSide*>> pairs;
  OperatorSide mass_a = eq.A0, mass_b = eq.B0;
  std::vector<OperatorSide> term_sides;
  term_sides.reserve(eq.terms.size() * 2);
  if (eq.has_mass) pairs.emplace_back(&mass_a, &mass_b);
  for (const auto& [a, b] : eq.terms) {
    term_sides.push_back(OperatorSide::make_sparse(a));
    term_sides.push_back(OperatorSide::make_sparse(b));
    pairs.emplace_back(&term_sides[term_sides.size() - 2],
                       &term_sides[term_sides.size() - 1]);
  }

  ProjectedSubproblem proj;
  const DenseMatrix u_p = select_rows(state.U, p);
  const DenseMatrix y_q = select_rows(state.Y, q);

  for (const auto& [a, b] : pairs) {
    if (a->is_identity()) {
      proj.p_adj.push_back(sorted_copy(p));
      proj.Z_A.emplace_back();
      proj.A_r.emplace_back();
    } else {
      IndexVector p_a = find_adjacent_rows(*a->sp, p);
      // Z_A = U(p_A,:) U(p,:)^+, so X(p_A,:) = Z_A X(p,:)
      DenseMatrix z = checked_pseudo_solve(u_p.transpose(),
                                           select_rows(state.U, p_a).transpose(),
                                           "U(p,:)")
                          .transpose();
      proj.A_r.emplace_back(a->sp->block(p, p_a) * z);
      proj.Z_A.emplace_back(std::move(z));
      proj.p_adj.push_back(std::move(p_a));
    }
    if (b->is_identity()) {
      proj.q_adj.push_back(sorted_copy(q));
      proj.Z_B.emplace_back();
      proj.B_r.emplace_back();
    } else {
      IndexVector q_b = find_adjacent(*b->sp, q);
      // Z_B = (Y^T(q,:))^+ Y^T(q_B,:), so X(:,q_B) = X(:,q) Z_B
      DenseMatrix z = checked_pseudo_solve(y_q.transpose(),
                                           select_rows(state.Y, q_b).transpose(),
                                           "Y(q,:)");
      proj.B_r.emplace_back(z * b->sp->block(q_b, q));
      proj.Z_B.emplace_back(std::move(z));
      proj.q_adj.push_back(std::move(q_b));
    }
  }
  return proj;
}

namespace {

OperatorSide reduced_side(const std::optional<DenseMatrix>& block) {
  if (!block) return OperatorSide::make_identity();
  return OperatorSide::make_dense(*block);
}

}  // namespace

GmresResult solve_column_subproblem(const StepEquation& eq,
                                    const ProjectedSubproblem& proj,
                                    const LowRankState& state, IndexSpan q,
                                    const SolverConfig& cfg) {
  const Index r = static_cast<Index>(q.size());
  LinearMatrixOperator op;
  op.has_mass = eq.has_mass;
  op.dt = eq.dt;
  size_t at = 0;
  if (eq.has_mass) {
    op.A0 = eq.A0;
    op.B0 = reduced_side(proj.B_r[at]);
    ++at;
  }
  for (const auto& [a, b] : eq.terms) {
    (void)b;
    op.terms.emplace_back(OperatorSide::make_sparse(a), reduced_side(proj.B_r[at]));
    ++at;
  }
  if (eq.hadamard) op.hadamard = eq.hadamard->col_block(q);

  const DenseMatrix rhs = rhs_cols(eq, q);
  const DenseMatrix x0 = state.col_block(q);
  const Index m = std::min<Index>(cfg.krylov_m, eq.n1 * r);
  return gmres_lme(op, rhs, x0, m, cfg.krylov_tol, cfg.max_restarts);
}

GmresResult solve_row_subproblem(const StepEquation& eq,
                                 const ProjectedSubproblem& proj,
                                 const LowRankState& state, IndexSpan p,
                                 const SolverConfig& cfg) {
  const Index r = static_cast<Index>(p.size());
  LinearMatrixOperator op;
  op.has_mass = eq.has_mass;
  op.dt = eq.dt;
  size_t at = 0;
  if (eq.has_mass) {
    op.A0 = reduced_side(proj.A_r[at]);
    op.B0 = eq.B0;
    ++at;
  }
  for (const auto& [a, b] : eq.terms) {
    (void)a;
    op.terms.emplace_back(reduced_side(proj.A_r[at]), OperatorSide::make_sparse(b));
    ++at;
  }
  if (eq.hadamard) op.hadamard = eq.hadamard->row_block(p);

  const DenseMatrix rhs = rhs_rows(eq, p);
  const DenseMatrix x0 = state.row_block(p);
  const Index m = std::min<Index>(cfg.krylov_m, eq.n2 * r);
  return gmres_lme(op, rhs, x0, m, cfg.krylov_tol, cfg.max_restarts);
}

SweepResult fixed_point_step(const StepEquation& eq, const LowRankState& state,
                             const SolverConfig& cfg, EstimatorState& est,
                             std::mt19937_64& rng) {
  const IndexVector q = deim(state.Y);
  const IndexVector p = deim(state.U);
  const ProjectedSubproblem proj = build_projections(eq, state, p, q);

  GmresResult col = solve_column_subproblem(eq, proj, state, q, cfg);
  GmresResult row = solve_row_subproblem(eq, proj, state, p, cfg);

  SweepResult out;
  // the two solves agree on X(p,q) only at the fixed point; average the
  // intersection so the reassembly treats rows and columns symmetrically
  const DenseMatrix core =
      0.5 * (select_rows(col.x, p) + select_cols(row.x, q));
  out.state = stable_cur_core(col.x, row.x, core, p, q);
  out.gmres_iterations = col.stats.iterations + row.stats.iterations;
  out.gmres_restarts = col.stats.restarts + row.stats.restarts;
  out.gmres_converged = col.stats.converged && row.stats.converged;

  const MatrixSampler diff = difference_sampler(out.state, state);
  const Index cap = std::min(eq.n1, eq.n2);
  const Index rank_est =
      std::min(out.state.rank() + cfg.rank_est_offset_delta, cap);
  NormEstimate ne = lowrank_norm_estimate(
      diff, est.delta ? &*est.delta : nullptr, rank_est, rng);
  est.delta = std::move(ne.state);
  out.delta_norm = ne.norm;
  return out;
}

namespace {

double residual_estimate(const StepEquation& eq, const LowRankState& state,
                         const SolverConfig& cfg, EstimatorState& est,
                         std::mt19937_64& rng) {
  const MatrixSampler s = residual_sampler(eq, state);
  const Index cap = std::min(eq.n1, eq.n2);
  const Index rank_est =
      std::min(state.rank() + cfg.rank_est_offset_residual, cap);
  NormEstimate ne =
      lowrank_norm_estimate(s, est.residual ? &*est.residual : nullptr, rank_est, rng);
  est.residual = std::move(ne.state);
  return ne.norm;
}

struct FpOutcome {
  int sweeps = 0;
  bool converged = false;
};

FpOutcome run_fixed_point(const StepEquation& eq, LowRankState& state,
                          const SolverConfig& cfg, EstimatorState& est,
                          std::mt19937_64& rng, SolveResult& agg,
                          int step_index) {
  FpOutcome out;
  for (int sweep = 1; sweep <= cfg.max_fp_iters; ++sweep) {
    SweepResult sr = fixed_point_step(eq, state, cfg, est, rng);
    state = std::move(sr.state);
    out.sweeps = sweep;
    agg.total_sweeps++;
    agg.gmres_iterations += sr.gmres_iterations;
    agg.gmres_restarts += sr.gmres_restarts;

    TraceRow row;
    row.step = step_index;
    row.sweep = sweep;
    row.rank = static_cast<int>(state.rank());
    row.delta_norm = sr.delta_norm;
    row.residual_norm = agg.residual_norm;
    row.gmres_iterations = sr.gmres_iterations;
    row.gmres_restarts = sr.gmres_restarts;
    row.sigma = state.sigma;
    agg.trace.push_back(std::move(row));

    const double denom = state.frob_norm();
    if (denom > 0.0 ? sr.delta_norm <= cfg.eps_delta * denom
                    : sr.delta_norm <= cfg.eps_delta) {
      out.converged = true;
      break;
    }
  }
  return out;
}

LowRankState default_steady_state0(Index n1, Index n2, Index r,
                                   std::mt19937_64& rng) {
  LowRankState s;
  s.U = random_orthonormal(n1, r, rng);
  s.Y = random_orthonormal(n2, r, rng);
  s.sigma = Vector::Zero(r);
  return s;
}

}  // namespace

SolveResult tdb_cur_solve(const StepEquation& eq, const LowRankState& state0,
                          const SolverConfig& cfg, std::mt19937_64& rng,
                          EstimatorState& est, int step_index) {
  SolveResult result;
  result.state = state0;

  const Index cap = std::min(eq.n1, eq.n2);
  const double b_norm =
      rhs_norm(eq, std::min(state0.rank() + cfg.rank_est_offset_residual, cap), rng);
  const double b_scale = b_norm > 0.0 ? b_norm : 1.0;

  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    result.outer_iterations = outer + 1;
    const FpOutcome fp =
        run_fixed_point(eq, result.state, cfg, est, rng, result, step_index);
    if (!fp.converged)
      result.message = "fixed-point iteration cap reached";

    const double res =
        residual_estimate(eq, result.state, cfg, est, rng) / b_scale;
    result.residual_norm = res;
    if (!result.trace.empty()) result.trace.back().residual_norm = res;

    if (res <= cfg.eps_residual) {
      result.converged = true;
      return result;
    }
    if (!cfg.adapt_rank) {
      result.message = "residual above tolerance at fixed rank";
      return result;
    }
    if (result.state.rank() + cfg.delta_rank > cfg.rank_max) {
      result.message = "rank_max reached with residual above tolerance";
      return result;
    }
    result.state = augment_rank(result.state, cfg.delta_rank, rng);
  }
  result.message = "outer iteration cap reached";
  return result;
}

SolveResult steady_solve(const LMEProblem& steady, const SolverConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const Index r = std::min({cfg.rank, steady.n1, steady.n2});
  const LowRankState s0 = default_steady_state0(steady.n1, steady.n2, r, rng);
  return steady_solve(steady, cfg, s0);
}

SolveResult steady_solve(const LMEProblem& steady, const SolverConfig& cfg,
                         const LowRankState& state0) {
  if (steady.transient)
    throw std::invalid_argument("steady_solve: problem is not steady");
  std::mt19937_64 rng(cfg.seed);
  EstimatorState est;

  const bool use_pseudo_time = cfg.fixed_dtau > 0.0 || cfg.dtau_max > 0.0;
  const StepEquation target = make_steady_direct(steady);
  if (!use_pseudo_time) {
    SolveResult r = tdb_cur_solve(target, state0, cfg, rng, est, 0);
    return r;
  }

  SolveResult result;
  result.state = state0;
  const Index cap = std::min(steady.n1, steady.n2);
  const double c_norm =
      rhs_norm(target, std::min(state0.rank() + cfg.rank_est_offset_residual, cap), rng);
  const double c_scale = c_norm > 0.0 ? c_norm : 1.0;

  // separate estimator bases for the steady-equation residual; the marching
  // equation residual is not the convergence target
  EstimatorState steady_est;
  double prev_res = std::numeric_limits<double>::infinity();
  int stagnation = 0;

  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    result.outer_iterations = k;
    const double dtau = pseudo_time_step(k, cfg);
    const StepEquation eq = make_pseudo_time_step(steady, dtau, result.state);
    const FpOutcome fp =
        run_fixed_point(eq, result.state, cfg, est, rng, result, k);
    if (!fp.converged) result.message = "fixed-point iteration cap reached";

    const double res =
        residual_estimate(target, result.state, cfg, steady_est, rng) / c_scale;
    result.residual_norm = res;
    if (!result.trace.empty()) result.trace.back().residual_norm = res;

    if (res <= cfg.eps_residual) {
      result.converged = true;
      return result;
    }
    if (cfg.adapt_rank) {
      stagnation = res > 0.5 * prev_res ? stagnation + 1 : 0;
      if (stagnation >= 2 &&
          result.state.rank() + cfg.delta_rank <= cfg.rank_max) {
        result.state = augment_rank(result.state, cfg.delta_rank, rng);
        stagnation = 0;
      }
    }
    prev_res = res;
  }
  result.message = "pseudo-time iteration cap reached";
  return result;
}

NewtonResult newton_solve(const NonlinearProblem& problem,
                          const LowRankState& x0, const SolverConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  EstimatorState est;

  const Index rank = std::min({cfg.rank, problem.n1, problem.n2});
  NewtonResult result;
  result.state = x0;
  if (result.state.rank() > rank)
    result.state = truncate_state(result.state, rank);
  else if (result.state.rank() < rank)
    result.state = augment_rank(result.state, rank - result.state.rank(), rng);

  LowRankState delta_guess =
      default_steady_state0(problem.n1, problem.n2, rank, rng);

  SolverConfig inner = cfg;
  inner.adapt_rank = false;

  double prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= cfg.max_newton_iters; ++it) {
    MatrixAccessor res_acc = problem.residual(result.state);
    MatrixAccessor jac = problem.jacobian_hadamard(result.state);

    LMEProblem lin;
    lin.n1 = problem.n1;
    lin.n2 = problem.n2;
    lin.transient = false;
    lin.terms = problem.terms;
    lin.hadamard = std::move(jac);
    // correction equation: jacobian(dX) = -residual(X)
    MatrixAccessor rhs;
    rhs.rows = res_acc.rows;
    rhs.cols = res_acc.cols;
    rhs.norm_hint = res_acc.norm_hint;
    rhs.col_block = [inner_acc = res_acc](IndexSpan q) {
      return DenseMatrix(-inner_acc.col_block(q));
    };
    rhs.row_block = [inner_acc = res_acc](IndexSpan p) {
      return DenseMatrix(-inner_acc.row_block(p));
    };
    lin.C = std::move(rhs);

    const StepEquation eq = make_steady_direct(lin);
    delta_guess.sigma.setZero();
    SolveResult corr = tdb_cur_solve(eq, delta_guess, inner, rng, est, it);
    delta_guess = corr.state;

    const double dn = delta_guess.frob_norm();
    result.delta_norms.push_back(dn);
    for (TraceRow& row : corr.trace) result.trace.push_back(row);

    result.state = add_states(result.state, 1.0, delta_guess, 1.0, rank);

    if (dn <= cfg.newton_tol) {
      result.converged = true;
      return result;
    }
    growth = dn > prev ? growth + 1 : 0;
    if (growth >= 3) {
      result.message = "newton iteration diverged (||dX|| grew 3 times in a row)";
      return result;
    }
    prev = dn;
  }
  result.message = "newton iteration cap reached";
  return result;
}

}  // namespace curlme

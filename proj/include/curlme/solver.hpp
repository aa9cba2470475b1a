#pragma once

#include "curlme/equation.hpp"
#include "curlme/selection.hpp"

#include <string>

namespace curlme {

struct SolverConfig {
  double eps_residual = 1e-10;   // relative to ||rhs||_F
  double eps_delta = 1e-9;       // relative to ||X||_F
  Index rank = 10;               // initial working rank
  Index delta_rank = 4;          // increment on residual failure
  Index rank_max = 64;
  bool adapt_rank = true;

  Index krylov_m = 60;
  double krylov_tol = 1e-12;
  int max_restarts = 10000;

  double dtau_max = 0.0;    // pseudo-time ramp ceiling; 0 disables the ramp
  double a_ramp = 25.0;
  double fixed_dtau = 0.0;  // constant pseudo-time step when > 0

  int max_fp_iters = 50;
  int max_outer_iters = 200;

  Index rank_est_offset_residual = 5;
  Index rank_est_offset_delta = 5;

  double newton_tol = 1e-9;  // absolute ||dX||_F stop
  int max_newton_iters = 30;

  uint64_t seed = 0;
};

/// Pseudo-time step schedule: 1 + dtau_max * (1 - exp(-(k-1)/a)) for
/// iteration k >= 1, or the configured constant step.
double pseudo_time_step(int k, const SolverConfig& cfg);

/// Projection data tying unsampled rows/columns to sampled ones. Entry 0 is
/// the mass pair when the equation has one; product terms follow in order.
/// For identity sides the reduced block is the identity and is marked absent.
struct ProjectedSubproblem {
  std::vector<IndexVector> p_adj;             // p_{A_i}
  std::vector<IndexVector> q_adj;             // q_{B_i}
  std::vector<std::optional<DenseMatrix>> Z_A;  // |p_Ai| x r
  std::vector<std::optional<DenseMatrix>> Z_B;  // r x |q_Bi|
  std::vector<std::optional<DenseMatrix>> A_r;  // r x r reduced left blocks
  std::vector<std::optional<DenseMatrix>> B_r;  // r x r reduced right blocks
};

ProjectedSubproblem build_projections(const StepEquation& eq,
                                      const LowRankState& state, IndexSpan p,
                                      IndexSpan q);

/// Column subproblem: solve for X(:,q) with the right sides reduced to r x r
/// through the Z projections. Returns the GMRES result on the n1 x r operand.
GmresResult solve_column_subproblem(const StepEquation& eq,
                                    const ProjectedSubproblem& proj,
                                    const LowRankState& state, IndexSpan q,
                                    const SolverConfig& cfg);
/// Row subproblem, mirrored: reduced left sides, full right sides.
GmresResult solve_row_subproblem(const StepEquation& eq,
                                 const ProjectedSubproblem& proj,
                                 const LowRankState& state, IndexSpan p,
                                 const SolverConfig& cfg);

/// Cross-approximation bases carried between iterations for the residual and
/// iterate-difference norm estimators.
struct EstimatorState {
  std::optional<LowRankState> residual;
  std::optional<LowRankState> delta;
};

struct SweepResult {
  LowRankState state;
  double delta_norm = 0.0;
  int gmres_iterations = 0;
  int gmres_restarts = 0;
  bool gmres_converged = true;
};

/// One fixed-point sweep: index selection from the current bases, adjacency
/// sets, projections, both subproblem solves, cross reassembly, and the
/// sampled ||dX||_F.
SweepResult fixed_point_step(const StepEquation& eq, const LowRankState& state,
                             const SolverConfig& cfg, EstimatorState& est,
                             std::mt19937_64& rng);

struct TraceRow {
  int step = 0;   // time step / pseudo-time iteration / Newton iteration
  int sweep = 0;  // fixed-point iteration within the step
  int rank = 0;
  double delta_norm = 0.0;
  double residual_norm = 0.0;  // relative; refreshed when measured
  int gmres_iterations = 0;
  int gmres_restarts = 0;
  Vector sigma;
};

struct SolveResult {
  LowRankState state;
  bool converged = false;
  double residual_norm = 0.0;  // relative
  std::vector<TraceRow> trace;
  int outer_iterations = 0;
  int total_sweeps = 0;
  long long gmres_iterations = 0;
  long long gmres_restarts = 0;
  std::string message;
};

/// Solve one linear matrix equation: fixed-point iterations to eps_delta,
/// then the sampled residual check; on failure the rank grows by delta_rank
/// until rank_max. state0 supplies the initial bases and GMRES guess.
SolveResult tdb_cur_solve(const StepEquation& eq, const LowRankState& state0,
                          const SolverConfig& cfg, std::mt19937_64& rng,
                          EstimatorState& est, int step_index = 0);

/// Steady problem driver. With pseudo-time enabled (fixed_dtau or dtau_max
/// positive) the steady equation is marched with the scheduled step and
/// convergence is measured on the steady residual itself; stagnation above
/// the tolerance raises the rank. Otherwise the steady equation is solved
/// directly.
SolveResult steady_solve(const LMEProblem& steady, const SolverConfig& cfg);
SolveResult steady_solve(const LMEProblem& steady, const SolverConfig& cfg,
                         const LowRankState& state0);

/// Nonlinear matrix equation via Newton linearization. Callbacks evaluate the
/// residual and the Hadamard Jacobian coefficient at the current iterate;
/// each correction solves a steady LME (no pseudo-time) at the working rank.
struct NonlinearProblem {
  Index n1 = 0, n2 = 0;
  std::vector<std::pair<std::shared_ptr<const SparseMatrix>,
                        std::shared_ptr<const SparseMatrix>>> terms;
  std::function<MatrixAccessor(const LowRankState&)> residual;
  std::function<MatrixAccessor(const LowRankState&)> jacobian_hadamard;
};

struct NewtonResult {
  LowRankState state;
  bool converged = false;
  std::vector<double> delta_norms;  // ||dX||_F per Newton iteration
  std::vector<TraceRow> trace;
  std::string message;
};

NewtonResult newton_solve(const NonlinearProblem& problem,
                          const LowRankState& x0, const SolverConfig& cfg);

}  // namespace curlme

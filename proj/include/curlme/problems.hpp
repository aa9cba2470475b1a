#pragma once

#include "curlme/solver.hpp"

namespace curlme {

/// P1 Lagrange matrices on a uniform 1-D grid: K tridiagonal (-1, 2, -1)/h,
/// M tridiagonal (1, 4, 1)*h/6.
struct Fem1D {
  Index n_nodes = 0;
  double h = 0.0;
  SparseMatrix M;
  SparseMatrix K;
};

Fem1D fem_1d(Index n_elements, double length);

/// a (x) b with column-stacking-compatible block ordering:
/// (a (x) b)[(i*nb + k), (j*nb + l)] = a(i,j) * b(k,l).
SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b);

/// Interior/boundary split of one factor grid.
struct AxisSplit {
  IndexVector interior;
  IndexVector boundary;
};

/// Transient heat equation on interior degrees of freedom in the form
/// A0 dX/dt B0 = A1 X B1 + A2 X B2 - C, with the Dirichlet data and the
/// volumetric source folded into C. The "a" factor is the row space (a 1-D
/// axis or a tensor-product plane), the "b" factor the column space.
struct HeatMde {
  LMEProblem problem;
  LowRankState x0;

  // full-grid operators and the split, for validation against the
  // unpartitioned equation
  SparseMatrix Ma_full, Ka_full, Mb_full, Kb_full;
  AxisSplit a_split, b_split;
  double rho_cp = 1.0, conductivity = 1.0;
  double source = 0.0, t_initial = 0.0, boundary_value = 0.0;
};

HeatMde assemble_heat_2d(Index nx, Index ny, double lx, double ly, double rho,
                         double cp, double k, double source, double t0,
                         double boundary_value);
HeatMde assemble_heat_3d(Index nx, Index ny, Index nz, double lx, double ly,
                         double lz, double rho, double cp, double k,
                         double source, double t0, double boundary_value);

enum class TimeScheme { euler, bdf2, bdf3 };

int scheme_order(TimeScheme s);
TimeScheme parse_scheme(const std::string& name);

/// Step equation for one implicit step toward time t_new. history[0] is X^n,
/// history[1] is X^{n-1}, ... Requires at least scheme_order(scheme) states.
StepEquation time_discretize(const LMEProblem& problem, TimeScheme scheme,
                             double dt, std::span<const LowRankState> history,
                             double t_new = 0.0);

struct TransientResult {
  LowRankState state;
  bool converged = true;
  std::vector<TraceRow> trace;
  long long gmres_iterations = 0;
  long long gmres_restarts = 0;
  int total_sweeps = 0;
  std::vector<int> sweeps_per_step;
};

/// March n_steps implicit steps. BDF2/BDF3 bootstrap from implicit Euler and
/// BDF2 at the same step size.
TransientResult transient_solve(const LMEProblem& problem,
                                const LowRankState& x0, TimeScheme scheme,
                                double dt, int n_steps,
                                const SolverConfig& cfg);

/// Steady generalized Lyapunov problem K X M + M X K = -g g^T on the
/// interior of a 2-D rectangle (stiffness carries the sign that makes the
/// dynamics dissipative). g is the columnwise sum of the interior-boundary
/// stiffness block, giving a rank-1 source.
struct LyapunovProblem {
  LMEProblem problem;
  Vector g;
  std::shared_ptr<const SparseMatrix> K_ii, M_ii;
};

LyapunovProblem assemble_lyapunov(Index nx, Index ny, double lx, double ly,
                                  double rho, double cp, double k);

/// Steady conduction with a radiative segment: the x = lx edge of the plane
/// radiates, every other boundary is held at dirichlet_value. Free plane
/// dofs are the interior plus the radiating edge; z is clamped at both ends.
struct RadiationProblem {
  NonlinearProblem nonlinear;
  LMEProblem linear_part;  // emissivity = 0 limit; also the Newton terms
  Vector radiating_mask;   // 1 on radiating plane dofs
  LowRankState x0;
  double emissivity = 0.0, sigma_sb = 0.0, t_ambient = 0.0,
         dirichlet_value = 0.0;
  Index n1 = 0, n2 = 0;
};

RadiationProblem assemble_radiation(Index nx, Index ny, Index nz, double lx,
                                    double ly, double lz, double emissivity,
                                    double sigma_sb, double t_ambient,
                                    double dirichlet_value);

}  // namespace curlme

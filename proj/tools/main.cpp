#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "curlme/oracle.hpp"
#include "curlme/problems.hpp"
#include "curlme/trace.hpp"

namespace fs = std::filesystem;
using namespace curlme;

namespace {

struct RunSpec {
  std::string problem;
  std::string scheme = "euler";
  Index nx = 12, ny = 12, nz = 12;
  double lx = 1.0, ly = 1.0, lz = 1.0;
  double dt = 0.0;
  double t_final = 0.0;
  int steps = 0;
  double rho = 1.0, cp = 1.0, conductivity = 1.0;
  double source = 1.0, t0 = 0.0, bc = 0.0;
  double emissivity = 0.9, sigma_sb = 5.67e-8, t_ambient = 273.15,
         dirichlet = 313.15;
  SolverConfig cfg;
  bool no_adapt = false;
  bool oracle = false;
  std::string output = "out";
  std::string matrices;
};

struct Summary {
  bool converged = false;
  double residual = 0.0;
  double wall_seconds = 0.0;
  long long gmres_iterations = 0;
  long long gmres_restarts = 0;
  int sweeps = 0;
  Index rank = 0;
  Index n1 = 0, n2 = 0;
  double fom_error = -1.0;  // relative Frobenius error vs the dense solve
};

void write_summary_csv(const fs::path& path, const RunSpec& spec, const Summary& s) {
  std::ofstream f(path, std::ios::binary);
  f << "problem,n1,n2,rank,converged,residual_norm,total_sweeps,"
       "gmres_iterations,gmres_restarts,krylov_memory_entries,wall_seconds,"
       "fom_relative_error\n";
  char buf[512];
  const long long mem = static_cast<long long>(s.n1) * s.rank * spec.cfg.krylov_m;
  std::snprintf(buf, sizeof(buf),
                "%s,%lld,%lld,%lld,%d,%.17g,%d,%lld,%lld,%lld,%.3f,",
                spec.problem.c_str(), static_cast<long long>(s.n1),
                static_cast<long long>(s.n2), static_cast<long long>(s.rank),
                s.converged ? 1 : 0, s.residual, s.sweeps, s.gmres_iterations,
                s.gmres_restarts, mem, s.wall_seconds);
  f << buf;
  if (s.fom_error >= 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", s.fom_error);
    f << buf;
  } else {
    f << "\n";
  }
}

LMEProblem load_from_files(const fs::path& dir, Index& n1, Index& n2) {
  LMEProblem p;
  auto a0_path = dir / "A0.mtx";
  auto b0_path = dir / "B0.mtx";
  p.transient = fs::exists(a0_path) || fs::exists(b0_path);
  if (fs::exists(a0_path))
    p.A0 = OperatorSide::make_sparse(
        std::make_shared<SparseMatrix>(read_matrix_market(a0_path.string())));
  if (fs::exists(b0_path))
    p.B0 = OperatorSide::make_sparse(
        std::make_shared<SparseMatrix>(read_matrix_market(b0_path.string())));

  for (int i = 1;; ++i) {
    auto ap = dir / ("A" + std::to_string(i) + ".mtx");
    auto bp = dir / ("B" + std::to_string(i) + ".mtx");
    if (!fs::exists(ap) || !fs::exists(bp)) break;
    p.terms.emplace_back(
        std::make_shared<SparseMatrix>(read_matrix_market(ap.string())),
        std::make_shared<SparseMatrix>(read_matrix_market(bp.string())));
  }
  if (p.terms.empty()) throw std::runtime_error("from-files: no A1/B1 pair found");
  n1 = p.terms.front().first->rows();
  n2 = p.terms.front().second->rows();
  p.n1 = n1;
  p.n2 = n2;

  auto c_path = dir / "C.csv";
  p.C = fs::exists(c_path)
            ? MatrixAccessor::from_dense(read_dense(c_path.string()))
            : MatrixAccessor::zero(n1, n2);
  auto e_path = dir / "E.csv";
  if (fs::exists(e_path))
    p.hadamard = MatrixAccessor::from_dense(read_dense(e_path.string()));
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative cross-approximation solver for multi-term linear "
               "matrix equations"};
  app.get_formatter()->column_width(38);

  RunSpec spec;
  app.add_option("--problem", spec.problem, "heat2d|heat3d|lyapunov|radiation|from-files")
      ->required();
  app.add_option("--scheme", spec.scheme, "euler|bdf2|bdf3 (transient only)");
  app.add_option("--nx", spec.nx, "elements in x");
  app.add_option("--ny", spec.ny, "elements in y");
  app.add_option("--nz", spec.nz, "elements in z");
  app.add_option("--lx", spec.lx, "domain length in x");
  app.add_option("--ly", spec.ly, "domain length in y");
  app.add_option("--lz", spec.lz, "domain length in z");
  app.add_option("--dt", spec.dt, "time step (transient)");
  app.add_option("--t-final", spec.t_final, "final time (transient)");
  app.add_option("--steps", spec.steps, "step count (alternative to --t-final)");
  app.add_option("--rho", spec.rho, "density");
  app.add_option("--cp", spec.cp, "specific heat");
  app.add_option("--conductivity", spec.conductivity, "thermal conductivity");
  app.add_option("--source", spec.source, "volumetric source");
  app.add_option("--t0", spec.t0, "initial value");
  app.add_option("--bc", spec.bc, "Dirichlet value");
  app.add_option("--emissivity", spec.emissivity, "surface emissivity");
  app.add_option("--sigma-sb", spec.sigma_sb, "Stefan-Boltzmann constant");
  app.add_option("--t-ambient", spec.t_ambient, "ambient temperature");
  app.add_option("--dirichlet", spec.dirichlet, "held boundary temperature");

  app.add_option("--rank", spec.cfg.rank, "initial rank");
  app.add_option("--delta-rank", spec.cfg.delta_rank, "rank increment");
  app.add_option("--rank-max", spec.cfg.rank_max, "rank cap");
  app.add_flag("--no-adapt", spec.no_adapt, "disable rank adaptivity");
  app.add_option("--eps-residual", spec.cfg.eps_residual, "relative residual tolerance");
  app.add_option("--eps-delta", spec.cfg.eps_delta, "fixed-point tolerance");
  app.add_option("--krylov-dim", spec.cfg.krylov_m, "GMRES subspace dimension");
  app.add_option("--krylov-tol", spec.cfg.krylov_tol, "GMRES relative tolerance");
  app.add_option("--max-restarts", spec.cfg.max_restarts, "GMRES restart cap");
  app.add_option("--max-fp-iters", spec.cfg.max_fp_iters, "fixed-point sweep cap");
  app.add_option("--max-outer-iters", spec.cfg.max_outer_iters, "outer iteration cap");
  app.add_option("--dtau-max", spec.cfg.dtau_max, "pseudo-time ramp ceiling");
  app.add_option("--a-ramp", spec.cfg.a_ramp, "pseudo-time ramp rate");
  app.add_option("--dtau", spec.cfg.fixed_dtau, "constant pseudo-time step");
  app.add_option("--newton-tol", spec.cfg.newton_tol, "Newton ||dX|| stop");
  app.add_option("--max-newton-iters", spec.cfg.max_newton_iters, "Newton cap");
  app.add_option("--seed", spec.cfg.seed, "random seed (env CURLME_SEED default)");
  app.add_option("--output", spec.output, "output directory");
  app.add_flag("--oracle", spec.oracle, "compare against the dense full-order solve");
  app.add_option("--matrices", spec.matrices, "input directory (from-files)");

  if (const char* env_seed = std::getenv("CURLME_SEED"))
    spec.cfg.seed = std::strtoull(env_seed, nullptr, 10);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spec.cfg.adapt_rank = !spec.no_adapt;

  try {
    const bool transient_problem =
        spec.problem == "heat2d" || spec.problem == "heat3d";
    if (!transient_problem && spec.problem != "lyapunov" &&
        spec.problem != "radiation" && spec.problem != "from-files") {
      std::cerr << "unknown problem: " << spec.problem << "\n";
      return 2;
    }

    fs::create_directories(spec.output);
    const fs::path out(spec.output);
    Summary summary;
    std::vector<TraceRow> trace;
    LowRankState final_state;
    bool converged = false;
    double residual = 0.0;

    const auto tic = std::chrono::steady_clock::now();

    if (transient_problem) {
      if (spec.dt <= 0.0) {
        std::cerr << "--dt required for transient problems\n";
        return 2;
      }
      int steps = spec.steps;
      if (steps <= 0 && spec.t_final > 0.0)
        steps = static_cast<int>(std::llround(spec.t_final / spec.dt));
      if (steps <= 0) {
        std::cerr << "--steps or --t-final required\n";
        return 2;
      }
      const TimeScheme scheme = parse_scheme(spec.scheme);
      HeatMde heat =
          spec.problem == "heat2d"
              ? assemble_heat_2d(spec.nx, spec.ny, spec.lx, spec.ly, spec.rho,
                                 spec.cp, spec.conductivity, spec.source,
                                 spec.t0, spec.bc)
              : assemble_heat_3d(spec.nx, spec.ny, spec.nz, spec.lx, spec.ly,
                                 spec.lz, spec.rho, spec.cp, spec.conductivity,
                                 spec.source, spec.t0, spec.bc);
      TransientResult r =
          transient_solve(heat.problem, heat.x0, scheme, spec.dt, steps, spec.cfg);
      trace = std::move(r.trace);
      final_state = r.state;
      converged = r.converged;
      residual = trace.empty() ? 0.0 : trace.back().residual_norm;
      summary.sweeps = r.total_sweeps;
      summary.gmres_iterations = r.gmres_iterations;
      summary.gmres_restarts = r.gmres_restarts;
      summary.n1 = heat.problem.n1;
      summary.n2 = heat.problem.n2;

      if (spec.oracle && heat.problem.n1 * heat.problem.n2 <= 40000) {
        const DenseMatrix x0d = heat.x0.to_dense();
        const DenseMatrix fom =
            oracle::fom_transient(heat.problem, scheme, spec.dt, steps, x0d);
        summary.fom_error = (final_state.to_dense() - fom).norm() / fom.norm();
      }
    } else if (spec.problem == "lyapunov" || spec.problem == "from-files") {
      LMEProblem problem;
      Index n1 = 0, n2 = 0;
      if (spec.problem == "lyapunov") {
        LyapunovProblem lp = assemble_lyapunov(spec.nx, spec.ny, spec.lx, spec.ly,
                                               spec.rho, spec.cp, spec.conductivity);
        problem = lp.problem;
        n1 = problem.n1;
        n2 = problem.n2;
      } else {
        if (spec.matrices.empty()) {
          std::cerr << "--matrices required for from-files\n";
          return 2;
        }
        problem = load_from_files(spec.matrices, n1, n2);
      }

      if (problem.transient) {
        if (spec.dt <= 0.0 || spec.steps <= 0) {
          std::cerr << "from-files with a mass pair needs --dt and --steps\n";
          return 2;
        }
        std::mt19937_64 rng(spec.cfg.seed);
        LowRankState x0;
        x0.U = random_orthonormal(n1, spec.cfg.rank, rng);
        x0.sigma = Vector::Zero(spec.cfg.rank);
        x0.Y = random_orthonormal(n2, spec.cfg.rank, rng);
        TransientResult r = transient_solve(problem, x0, parse_scheme(spec.scheme),
                                            spec.dt, spec.steps, spec.cfg);
        trace = std::move(r.trace);
        final_state = r.state;
        converged = r.converged;
        summary.sweeps = r.total_sweeps;
        summary.gmres_iterations = r.gmres_iterations;
        summary.gmres_restarts = r.gmres_restarts;
      } else {
        SolveResult r = steady_solve(problem, spec.cfg);
        trace = std::move(r.trace);
        final_state = r.state;
        converged = r.converged;
        residual = r.residual_norm;
        summary.sweeps = r.total_sweeps;
        summary.gmres_iterations = r.gmres_iterations;
        summary.gmres_restarts = r.gmres_restarts;

        if (spec.oracle && n1 * n2 <= 40000) {
          const DenseMatrix fom = oracle::fom_steady(problem);
          summary.fom_error = (final_state.to_dense() - fom).norm() / fom.norm();
        }
      }
      summary.n1 = n1;
      summary.n2 = n2;
    } else {  // radiation
      RadiationProblem rp = assemble_radiation(
          spec.nx, spec.ny, spec.nz, spec.lx, spec.ly, spec.lz, spec.emissivity,
          spec.sigma_sb, spec.t_ambient, spec.dirichlet);
      NewtonResult r = newton_solve(rp.nonlinear, rp.x0, spec.cfg);
      trace = std::move(r.trace);
      final_state = r.state;
      converged = r.converged;
      residual = r.delta_norms.empty() ? 0.0 : r.delta_norms.back();
      summary.n1 = rp.n1;
      summary.n2 = rp.n2;

      if (spec.oracle && rp.n1 * rp.n2 <= 40000) {
        const oracle::NewtonTrace fom = oracle::fom_newton(
            rp.nonlinear, rp.x0.to_dense(), spec.cfg.newton_tol);
        summary.fom_error =
            (final_state.to_dense() - fom.x).norm() / fom.x.norm();
      }
    }

    const auto toc = std::chrono::steady_clock::now();
    summary.wall_seconds =
        std::chrono::duration<double>(toc - tic).count();
    summary.converged = converged;
    summary.residual = residual;
    summary.rank = final_state.rank();

    Index sigma_cols = 0;
    for (const TraceRow& row : trace)
      sigma_cols = std::max(sigma_cols, static_cast<Index>(row.sigma.size()));
    write_trace_csv(trace, sigma_cols, (out / "trace.csv").string());
    write_summary_csv(out / "summary.csv", spec, summary);

    std::cout << (converged ? "converged" : "not converged")
              << ", rank " << final_state.rank()
              << ", residual " << residual << "\n";
    return converged ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

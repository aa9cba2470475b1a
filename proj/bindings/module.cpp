#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curlme/oracle.hpp"
#include "curlme/problems.hpp"
#include "curlme/trace.hpp"

namespace py = pybind11;
using namespace curlme;

namespace {

SparseMatrix sparse_from_triplets(Index rows, Index cols,
                                  const std::vector<Index>& ri,
                                  const std::vector<Index>& ci,
                                  const std::vector<double>& v) {
  if (ri.size() != ci.size() || ri.size() != v.size())
    throw std::invalid_argument("triplet arrays must have equal length");
  std::vector<SparseMatrix::Triplet> t(ri.size());
  for (size_t k = 0; k < ri.size(); ++k) t[k] = {ri[k], ci[k], v[k]};
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

py::dict result_dict(const SolveResult& r) {
  py::dict d;
  d["U"] = r.state.U;
  d["sigma"] = r.state.sigma;
  d["Y"] = r.state.Y;
  d["converged"] = r.converged;
  d["residual_norm"] = r.residual_norm;
  d["outer_iterations"] = r.outer_iterations;
  d["total_sweeps"] = r.total_sweeps;
  d["gmres_iterations"] = r.gmres_iterations;
  d["gmres_restarts"] = r.gmres_restarts;
  d["message"] = r.message;
  return d;
}

SolverConfig config_from_kwargs(const py::kwargs& kw) {
  SolverConfig cfg;
  for (auto item : kw) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "eps_residual") cfg.eps_residual = py::cast<double>(item.second);
    else if (key == "eps_delta") cfg.eps_delta = py::cast<double>(item.second);
    else if (key == "rank") cfg.rank = py::cast<Index>(item.second);
    else if (key == "delta_rank") cfg.delta_rank = py::cast<Index>(item.second);
    else if (key == "rank_max") cfg.rank_max = py::cast<Index>(item.second);
    else if (key == "adapt_rank") cfg.adapt_rank = py::cast<bool>(item.second);
    else if (key == "krylov_m") cfg.krylov_m = py::cast<Index>(item.second);
    else if (key == "krylov_tol") cfg.krylov_tol = py::cast<double>(item.second);
    else if (key == "max_restarts") cfg.max_restarts = py::cast<int>(item.second);
    else if (key == "dtau_max") cfg.dtau_max = py::cast<double>(item.second);
    else if (key == "a_ramp") cfg.a_ramp = py::cast<double>(item.second);
    else if (key == "fixed_dtau") cfg.fixed_dtau = py::cast<double>(item.second);
    else if (key == "max_fp_iters") cfg.max_fp_iters = py::cast<int>(item.second);
    else if (key == "max_outer_iters") cfg.max_outer_iters = py::cast<int>(item.second);
    else if (key == "newton_tol") cfg.newton_tol = py::cast<double>(item.second);
    else if (key == "max_newton_iters") cfg.max_newton_iters = py::cast<int>(item.second);
    else if (key == "seed") cfg.seed = py::cast<uint64_t>(item.second);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Iterative cross-approximation solver for multi-term linear "
            "matrix equations";

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def_static("from_triplets", &sparse_from_triplets, py::arg("rows"),
                  py::arg("cols"), py::arg("row_indices"), py::arg("col_indices"),
                  py::arg("values"))
      .def_static("identity", &SparseMatrix::identity)
      .def_property_readonly("shape",
                             [](const SparseMatrix& s) {
                               return py::make_tuple(s.rows(), s.cols());
                             })
      .def("nnz", &SparseMatrix::nnz)
      .def("to_dense", &SparseMatrix::to_dense);

  m.def("read_matrix_market", &read_matrix_market);
  m.def("write_matrix_market", &write_matrix_market);

  m.def("thin_svd", [](const DenseMatrix& x) {
    const SvdFactors f = thin_svd(x);
    return py::make_tuple(f.left, f.sigma, f.right);
  });
  m.def("pseudo_solve", &pseudo_solve);
  m.def("frob_inner", &frob_inner);
  m.def("deim", [](const DenseMatrix& basis) { return deim(basis); });
  m.def("find_adjacent", [](const SparseMatrix& b, const IndexVector& q) {
    return find_adjacent(b, q);
  });

  m.def("stable_cur", [](const DenseMatrix& cols, const DenseMatrix& rows,
                         const IndexVector& p, const IndexVector& q) {
    const LowRankState s = stable_cur(cols, rows, p, q);
    return py::make_tuple(s.U, s.sigma, s.Y);
  });
  m.def("cur_diagnostics", [](const DenseMatrix& u, const DenseMatrix& y,
                              const IndexVector& p, const IndexVector& q) {
    const CurDiagnostics d = cur_diagnostics(u, y, p, q);
    py::dict out;
    out["eta_r"] = d.eta_r;
    out["eta_c"] = d.eta_c;
    out["c_bound"] = d.c_bound;
    return out;
  });

  m.def(
      "gmres_lme",
      [](const std::vector<std::pair<SparseMatrix, SparseMatrix>>& terms,
         const DenseMatrix& rhs, const DenseMatrix& x0, double dt, Index m_dim,
         double tol, int max_restarts) {
        LinearMatrixOperator op;
        op.has_mass = true;
        op.dt = dt;
        for (const auto& [a, b] : terms)
          op.terms.emplace_back(
              OperatorSide::make_sparse(std::make_shared<SparseMatrix>(a)),
              OperatorSide::make_sparse(std::make_shared<SparseMatrix>(b)));
        const GmresResult r = gmres_lme(op, rhs, x0, m_dim, tol, max_restarts);
        py::dict stats;
        stats["iterations"] = r.stats.iterations;
        stats["restarts"] = r.stats.restarts;
        stats["converged"] = r.stats.converged;
        stats["rel_residual"] = r.stats.rel_residual;
        stats["residual_history"] = r.stats.residual_history;
        return py::make_tuple(r.x, stats);
      },
      py::arg("terms"), py::arg("rhs"), py::arg("x0"), py::arg("dt"),
      py::arg("m"), py::arg("tol"), py::arg("max_restarts") = 10000,
      "Solve (X - dt * sum Ai X Bi) = rhs with matrix-valued GMRES");

  py::class_<LyapunovProblem>(m, "LyapunovProblem")
      .def_property_readonly("n", [](const LyapunovProblem& p) { return p.problem.n1; })
      .def_property_readonly("g", [](const LyapunovProblem& p) { return p.g; });

  m.def("assemble_lyapunov", &assemble_lyapunov, py::arg("nx"), py::arg("ny"),
        py::arg("lx") = 1.0, py::arg("ly") = 1.0, py::arg("rho") = 1.0,
        py::arg("cp") = 1.0, py::arg("k") = 1.0);

  m.def("solve_lyapunov", [](const LyapunovProblem& p, const py::kwargs& kw) {
    const SolverConfig cfg = config_from_kwargs(kw);
    return result_dict(steady_solve(p.problem, cfg));
  });

  m.def("lyapunov_residual",
        [](const LyapunovProblem& p, const DenseMatrix& u, const Vector& sigma,
           const DenseMatrix& y) {
          const DenseMatrix x = u * sigma.asDiagonal() * y.transpose();
          const DenseMatrix kd = p.K_ii->to_dense();
          const DenseMatrix md = p.M_ii->to_dense();
          const DenseMatrix r = kd * x * md + md * x * kd + p.g * p.g.transpose();
          return r.norm() / (p.g * p.g.transpose()).norm();
        });

  py::class_<HeatMde>(m, "HeatMde")
      .def_property_readonly("n1", [](const HeatMde& h) { return h.problem.n1; })
      .def_property_readonly("n2", [](const HeatMde& h) { return h.problem.n2; });

  m.def("assemble_heat_2d", &assemble_heat_2d, py::arg("nx"), py::arg("ny"),
        py::arg("lx") = 1.0, py::arg("ly") = 1.0, py::arg("rho") = 1.0,
        py::arg("cp") = 1.0, py::arg("k") = 1.0, py::arg("source") = 1.0,
        py::arg("t0") = 0.0, py::arg("boundary_value") = 0.0);
  m.def("assemble_heat_3d", &assemble_heat_3d, py::arg("nx"), py::arg("ny"),
        py::arg("nz"), py::arg("lx") = 1.0, py::arg("ly") = 1.0,
        py::arg("lz") = 1.0, py::arg("rho") = 1.0, py::arg("cp") = 1.0,
        py::arg("k") = 1.0, py::arg("source") = 1.0, py::arg("t0") = 0.0,
        py::arg("boundary_value") = 0.0);

  m.def("solve_heat", [](const HeatMde& h, const std::string& scheme, double dt,
                         int steps, const py::kwargs& kw) {
    const SolverConfig cfg = config_from_kwargs(kw);
    const TransientResult r =
        transient_solve(h.problem, h.x0, parse_scheme(scheme), dt, steps, cfg);
    py::dict d;
    d["U"] = r.state.U;
    d["sigma"] = r.state.sigma;
    d["Y"] = r.state.Y;
    d["converged"] = r.converged;
    d["total_sweeps"] = r.total_sweeps;
    d["gmres_iterations"] = r.gmres_iterations;
    return d;
  });

  m.def("fom_heat", [](const HeatMde& h, const std::string& scheme, double dt,
                       int steps) {
    return oracle::fom_transient(h.problem, parse_scheme(scheme), dt, steps,
                                 h.x0.to_dense());
  });

  py::class_<RadiationProblem>(m, "RadiationProblem")
      .def_property_readonly("n1", [](const RadiationProblem& p) { return p.n1; })
      .def_property_readonly("n2", [](const RadiationProblem& p) { return p.n2; });

  m.def("assemble_radiation", &assemble_radiation, py::arg("nx"), py::arg("ny"),
        py::arg("nz"), py::arg("lx") = 1.0, py::arg("ly") = 1.0,
        py::arg("lz") = 1.0, py::arg("emissivity") = 0.9,
        py::arg("sigma_sb") = 5.67e-8, py::arg("t_ambient") = 273.15,
        py::arg("dirichlet_value") = 313.15);

  m.def("solve_radiation", [](const RadiationProblem& p, const py::kwargs& kw) {
    const SolverConfig cfg = config_from_kwargs(kw);
    const NewtonResult r = newton_solve(p.nonlinear, p.x0, cfg);
    py::dict d;
    d["U"] = r.state.U;
    d["sigma"] = r.state.sigma;
    d["Y"] = r.state.Y;
    d["converged"] = r.converged;
    d["delta_norms"] = r.delta_norms;
    d["message"] = r.message;
    return d;
  });

  m.def("pseudo_time_step", [](int k, double dtau_max, double a_ramp) {
    SolverConfig cfg;
    cfg.dtau_max = dtau_max;
    cfg.a_ramp = a_ramp;
    return pseudo_time_step(k, cfg);
  });
}

"""Iterative cross-approximation solver for multi-term linear matrix equations."""

from ._core import (
    SparseMatrix,
    assemble_heat_2d,
    assemble_heat_3d,
    assemble_lyapunov,
    assemble_radiation,
    cur_diagnostics,
    deim,
    find_adjacent,
    fom_heat,
    frob_inner,
    gmres_lme,
    lyapunov_residual,
    pseudo_solve,
    pseudo_time_step,
    read_matrix_market,
    solve_heat,
    solve_lyapunov,
    solve_radiation,
    stable_cur,
    thin_svd,
    write_matrix_market,
)

__all__ = [
    "SparseMatrix",
    "assemble_heat_2d",
    "assemble_heat_3d",
    "assemble_lyapunov",
    "assemble_radiation",
    "cur_diagnostics",
    "deim",
    "find_adjacent",
    "fom_heat",
    "frob_inner",
    "gmres_lme",
    "lyapunov_residual",
    "pseudo_solve",
    "pseudo_time_step",
    "read_matrix_market",
    "solve_heat",
    "solve_lyapunov",
    "solve_radiation",
    "stable_cur",
    "thin_svd",
    "write_matrix_market",
]

__version__ = "0.1.0"

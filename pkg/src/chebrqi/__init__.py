"""Chebyshev-filtered subspace eigensolvers for sparse symmetric pencils."""
from .dense import DenseEigResult, dense_oracle, sym_eig, sym_gen_eig
from .filter import FilterParams, cheb_poly_value, chebyshev_filter, filter_gain_profile
from .krylov import InnerSolveConfig, InnerSolveReport, cr_solve, minres_solve
from .linalg import (
    MvCounter,
    ShiftedOperator,
    SparsePencil,
    SparseSymMatrix,
    b_inner,
    orthonormalize_against,
    rayleigh_quotient,
    relative_residual,
    spmv,
)
from .mmio import read_matrix_market, write_matrix_market
from .problems import AssembledPencil, BeamSpec, assemble_beam, assemble_laplacian_1d
from .rqi import RqiConfig, irqi_step, rqi_exact
from .solvers import (
    EigResult,
    SolverConfig,
    SubspaceState,
    cd_solve,
    crs_solve,
    select_filter_params,
    update_projection,
)

__version__ = "0.1.0"

"""Stochastic eigenvalue counting for sparse symmetric, generalized and non-symmetric problems."""

__version__ = "0.1.0"

from .bounds import AffineMap, SpectralBounds, affine_map, affine_unmap, lanczos_bounds
from .chebyshev import (ChebFilter, cheb_coeffs, filter_apply, filter_eval,
                        filter_quadratic_form, jackson_coeffs, lanczos_sigma_coeffs, make_filter)
from .count import (CountReport, count_poly_generalized, count_poly_standard, count_rational,
                    count_rational_nonsymmetric, count_rational_swapped, suggest_subspace_size)
from .mmio import MatrixMarketError, load_matrix_market, write_matrix_market
from .oracle import DenseSpectrum, dense_spectrum, exact_count, exact_filter_trace
from .rational import (ContourQuadrature, build_fullcircle_quadrature,
                       build_halfcircle_quadrature, gauss_legendre, rational_eval)
from .solvers import ShiftedOperator, SolverConfig, SolverError, dense_lu_factor, dense_lu_solve, gmres
from .sparse import ClusterSpec, Pencil, SparseMatrix, gen_diag_spectrum, gen_laplacian, matvec
from .trace import SampleConfig, TraceRun, hutchinson_min_samples, rq_estimate, sample_vector

__all__ = [
    "AffineMap", "SpectralBounds", "affine_map", "affine_unmap", "lanczos_bounds",
    "ChebFilter", "cheb_coeffs", "filter_apply", "filter_eval", "filter_quadratic_form",
    "jackson_coeffs", "lanczos_sigma_coeffs", "make_filter",
    "CountReport", "count_poly_generalized", "count_poly_standard", "count_rational",
    "count_rational_nonsymmetric", "count_rational_swapped", "suggest_subspace_size",
    "MatrixMarketError", "load_matrix_market", "write_matrix_market",
    "DenseSpectrum", "dense_spectrum", "exact_count", "exact_filter_trace",
    "ContourQuadrature", "build_fullcircle_quadrature", "build_halfcircle_quadrature",
    "gauss_legendre", "rational_eval",
    "ShiftedOperator", "SolverConfig", "SolverError", "dense_lu_factor", "dense_lu_solve", "gmres",
    "ClusterSpec", "Pencil", "SparseMatrix", "gen_diag_spectrum", "gen_laplacian", "matvec",
    "SampleConfig", "TraceRun", "hutchinson_min_samples", "rq_estimate", "sample_vector",
]

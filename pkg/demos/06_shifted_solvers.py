"""
Shifted linear solves
=====================

Each pole needs a solve with A - zI. For moderate sizes a dense LU is
simplest; restarted GMRES only needs matrix-vector products. Here both
are applied to a Laplacian at a complex shift.
"""
import numpy as np

from speccount.solvers import (ShiftedOperator, SolverConfig, dense_lu_factor, dense_lu_solve,
                               gmres)
from speccount.sparse import gen_laplacian

A = gen_laplacian(24, 24)
op = ShiftedOperator(A, 2.0 + 0.3j)
rhs = np.random.default_rng(0).standard_normal(A.n)

x_lu = dense_lu_solve(dense_lu_factor(op), rhs)
for tol in (1e-1, 1e-3, 1e-8):
    res = gmres(op, rhs, SolverConfig("gmres", tol, restart=20, max_iters=500))
    err = np.linalg.norm(res.solution - x_lu) / np.linalg.norm(x_lu)
    print(f"tol {tol:.0e}: {res.iters:3d} iterations, residual {res.rel_residual:.1e}, "
          f"distance to LU solution {err:.1e}")

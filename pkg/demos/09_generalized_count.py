"""
Counting for a symmetric-definite pencil
========================================

For A x = lambda B x the count on [a, b] is the number of nonnegative
eigenvalues of A - aB minus that of A - bB. Both are estimated with a
high-pass filter at zero using the same probes.
"""
import numpy as np

from speccount.count import count_poly_generalized, count_rational
from speccount.oracle import dense_spectrum, exact_count
from speccount.solvers import SolverConfig
from speccount.sparse import Pencil, SparseMatrix
from speccount.trace import SampleConfig

rng = np.random.default_rng(5)
n = 200
M = rng.standard_normal((n, n))
R = 0.1 * rng.standard_normal((n, n))
P = Pencil(SparseMatrix((M + M.T) / 2, "symmetric"),
           SparseMatrix(np.eye(n) + R @ R.T, "symmetric"))

interval = (-2.0, 3.0)
print("exact count:", exact_count(dense_spectrum(P), interval=interval))

cfg = SampleConfig(n_v_max=200, seed=0, early_stop=False)
rep = count_poly_generalized(P, interval, 150, "none", cfg)
print(f"polynomial: {rep.estimate:.2f} "
      f"(mu_a {rep.sub_reports['mu_a'].estimate:.2f}, mu_b {rep.sub_reports['mu_b'].estimate:.2f})")
rep = count_rational(P, interval, 8, SolverConfig(), cfg)
print(f"rational:   {rep.estimate:.2f}")

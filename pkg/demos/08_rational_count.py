"""
Counting eigenvalues with a rational filter
===========================================

The same count, now with contour poles. For a real symmetric matrix only
the upper poles are solved; the lower ones follow by conjugation. The
swapped loop order gives the same number.
"""
from speccount.count import count_rational, count_rational_swapped
from speccount.oracle import dense_spectrum, exact_count
from speccount.solvers import SolverConfig
from speccount.sparse import gen_laplacian
from speccount.trace import SampleConfig

A = gen_laplacian(30, 30)
interval = (1.0, 2.0)
print("exact count:", exact_count(dense_spectrum(A), interval=interval))

cfg = SampleConfig(n_v_max=100, seed=0, early_stop=False)
for m in (2, 4, 8):
    rep = count_rational(A, interval, m, SolverConfig(), cfg)
    print(f"{m} upper poles: estimate {rep.estimate:7.2f}")

swp = count_rational_swapped(A, interval, 8, SolverConfig(), cfg)
print(f"swapped loops:  estimate {swp.estimate:7.2f}")
for entry in swp.partials:
    print(f"  pole {entry['pole']}: cumulative {entry['cumulative']:.3f}")

rep = count_rational(A, interval, 8, SolverConfig("gmres", 1e-3), cfg)
print(f"GMRES tol 1e-3: estimate {rep.estimate:7.2f}, solver {rep.method['solver_stats']}")

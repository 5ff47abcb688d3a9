"""
Counting eigenvalues with a polynomial filter
=============================================

A 2-D Laplacian has a known spectrum, so we can compare the stochastic
count against the exact one for a few filter degrees.
"""
from speccount.count import count_poly_standard
from speccount.oracle import dense_spectrum, exact_count
from speccount.sparse import gen_laplacian
from speccount.trace import SampleConfig

A = gen_laplacian(30, 30)
interval = (1.0, 2.0)
exact = exact_count(dense_spectrum(A), interval=interval)
print("exact count:", exact)

cfg = SampleConfig(n_v_max=100, seed=0)
for p in (30, 80, 150):
    for damping in ("none", "jackson"):
        rep = count_poly_standard(A, interval, p, damping, cfg)
        print(f"p={p:3d} {damping:8s} estimate {rep.estimate:7.2f} "
              f"(rounded {rep.rounded}, {rep.n_v_used} samples)")

print(rep.to_json(timing=False)[:400], "...")

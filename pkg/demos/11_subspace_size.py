"""
Choosing a subspace size for a contour eigensolver
==================================================

Contour eigensolvers need a search space somewhat larger than the number
of wanted eigenvalues. The suggestion counts over the interval widened by
a quarter of its length on each side.
"""
from speccount.count import suggest_subspace_size
from speccount.oracle import dense_spectrum, exact_count
from speccount.sparse import gen_laplacian
from speccount.trace import SampleConfig

A = gen_laplacian(30, 30)
interval = (1.0, 2.0)
spec = dense_spectrum(A)

s = suggest_subspace_size(A, interval, "poly", p=100, cfg=SampleConfig(n_v_max=100, seed=0))
lo, hi = s.enlarged_interval
print(f"inner count    {s.inner.estimate:7.2f}   exact {exact_count(spec, interval=interval)}")
print(f"enlarged count {s.enlarged.estimate:7.2f}   exact {exact_count(spec, interval=(lo, hi))}")
print("suggested subspace size:", s.m0)

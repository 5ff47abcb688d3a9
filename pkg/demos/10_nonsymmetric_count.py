"""
Counting eigenvalues of a general matrix in a disk
==================================================

For a non-Hermitian matrix the full circle is needed and the probes are
complex. The imaginary parts of the quotients average out as more
probes are drawn.
"""
import numpy as np

from speccount.count import count_rational_nonsymmetric
from speccount.oracle import dense_spectrum, exact_count
from speccount.sparse import SparseMatrix
from speccount.trace import SampleConfig

rng = np.random.default_rng(8)
n = 300
# a non-normal matrix: shifted random diagonal plus a small strictly upper part
D = np.diag(rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
U = np.triu(0.02 * rng.standard_normal((n, n)), 1)
A = SparseMatrix(D + U)

center, radius = 0.2 + 0.1j, 0.4
print("exact count:", exact_count(dense_spectrum(A), disk=(center, radius)))
cfg = SampleConfig(kind="complex_rademacher", n_v_max=150, seed=0, early_stop=False)
rep = count_rational_nonsymmetric(A, center, radius, 16, cfg=cfg)
print(f"estimate {rep.estimate:.2f}, mean imaginary part {rep.method['mean_imag']:.2e}")

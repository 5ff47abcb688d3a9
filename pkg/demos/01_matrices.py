"""
Building and storing test matrices
==================================

Sparse matrices are immutable CSR objects. Here we build a 2-D Laplacian
and a clustered diagonal spectrum, round-trip one through a Matrix Market
file and check that nothing changed.
"""
import os
import tempfile

import numpy as np

from speccount.mmio import load_matrix_market, write_matrix_market
from speccount.sparse import ClusterSpec, gen_diag_spectrum, gen_laplacian

L = gen_laplacian(20, 20)
print(L)
print("symmetry defect:", L.symmetry_defect())

# 300 background points on [0, 1] plus a tight cluster of 40 at 0.5
D = gen_diag_spectrum(ClusterSpec(340, (0.0, 1.0), ((0.5, 1e-3, 40),)), seed=1)
lam = D.diagonal()
print("eigenvalues within 1e-3 of 0.5:", np.count_nonzero(abs(lam - 0.5) <= 5e-4))

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "lap.mtx")
    write_matrix_market(path, L, comment="20x20 Laplacian")
    back = load_matrix_market(path)
    print("round trip exact:", np.array_equal(back.toarray(), L.toarray()), back.symmetry)

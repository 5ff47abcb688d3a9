"""
Enclosing the spectrum
======================

Polynomial filters work on [-1, 1], so the spectrum must be mapped there
first. A short Lanczos run gives an interval that contains every
eigenvalue; we compare it with the true extremes.
"""
import numpy as np

from speccount.bounds import lanczos_bounds
from speccount.oracle import dense_spectrum
from speccount.sparse import gen_laplacian

A = gen_laplacian(30, 30)
bnd = lanczos_bounds(A, seed=0)
lam = dense_spectrum(A).eigenvalues

print(f"Lanczos bounds  [{bnd.lmin:.6f}, {bnd.lmax:.6f}] after {bnd.steps} steps")
print(f"true extremes   [{lam[0]:.6f}, {lam[-1]:.6f}]")
print("encloses spectrum:", bnd.contains(lam))

# the affine map sends the bounds to -1 and 1
amap = bnd.affine
print("mapped extremes:", amap.map(np.array([lam[0], lam[-1]])))

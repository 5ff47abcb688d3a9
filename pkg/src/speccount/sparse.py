"""Sparse matrix storage, products and synthetic test matrices.

Matrices are kept in compressed sparse row form. Storage is delegated to
:class:`scipy.sparse.csr_matrix`; :class:`SparseMatrix` adds the symmetry
metadata the estimators rely on and freezes the arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

__all__ = [
    "SparseMatrix",
    "Pencil",
    "ClusterSpec",
    "matvec",
    "pencil_shift_apply",
    "gen_laplacian",
    "gen_diag_spectrum",
    "DEFAULT_SIZE_CAP",
]

SYMMETRY_KINDS = ("symmetric", "hermitian", "general")
DEFAULT_SIZE_CAP = 2_000_000


class SparseMatrix:
    """Immutable square CSR matrix with symmetry metadata.

    Parameters
    ----------
    matrix : scipy sparse matrix or array_like
        Square matrix. Converted to CSR with sorted, summed indices.
    symmetry : {'symmetric', 'hermitian', 'general'}
        Declared structure. Not verified here; see
        :meth:`symmetry_defect` for a numerical check.
    """

    __slots__ = ("_csr", "symmetry")

    def __init__(self, matrix, symmetry: str = "general"):
        if symmetry not in SYMMETRY_KINDS:
            raise ValueError(f"unknown symmetry kind {symmetry!r}")
        csr = sp.csr_matrix(matrix)
        if csr.shape[0] != csr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {csr.shape}")
        if np.iscomplexobj(csr.data):
            csr = csr.astype(np.complex128)
        else:
            csr = csr.astype(np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        for arr in (csr.data, csr.indices, csr.indptr):
            arr.flags.writeable = False
        self._csr = csr
        self.symmetry = symmetry

    @classmethod
    def from_csr_arrays(cls, n, row_ptr, col_idx, values, symmetry="general"):
        row_ptr = np.asarray(row_ptr)
        col_idx = np.asarray(col_idx)
        if row_ptr.shape != (n + 1,):
            raise ValueError("row_ptr must have n+1 entries")
        if np.any(np.diff(row_ptr) < 0) or row_ptr[0] != 0:
            raise ValueError("row_ptr must start at 0 and be nondecreasing")
        if row_ptr[-1] != len(col_idx) or len(col_idx) != len(values):
            raise ValueError("row_ptr[-1] must equal the number of stored entries")
        if len(col_idx) and (col_idx.min() < 0 or col_idx.max() >= n):
            raise ValueError("column index out of range")
        return cls(sp.csr_matrix((values, col_idx, row_ptr), shape=(n, n)), symmetry)

    @classmethod
    def from_diagonal(cls, values) -> "SparseMatrix":
        values = np.asarray(values)
        # a diagonal with complex entries is normal but not Hermitian
        kind = "general" if np.iscomplexobj(values) and np.any(values.imag) else "symmetric"
        return cls(sp.diags(values, format="csr"), kind)

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def shape(self):
        return self._csr.shape

    @property
    def dtype(self):
        return self._csr.dtype

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def row_ptr(self) -> np.ndarray:
        return self._csr.indptr

    @property
    def col_idx(self) -> np.ndarray:
        return self._csr.indices

    @property
    def values(self) -> np.ndarray:
        return self._csr.data

    @property
    def scalar_kind(self) -> str:
        return "complex" if np.iscomplexobj(self._csr.data) else "real"

    @property
    def is_hermitian(self) -> bool:
        """True for real symmetric or complex Hermitian storage."""
        if self.symmetry == "hermitian":
            return True
        return self.symmetry == "symmetric" and self.scalar_kind == "real"

    @property
    def csr(self) -> sp.csr_matrix:
        """The underlying scipy matrix (read-only arrays)."""
        return self._csr

    def matvec(self, v):
        return self._csr @ v

    def rmatvec(self, v):
        return self._csr.conj().T @ v

    def __matmul__(self, v):
        return self._csr @ v

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def symmetry_defect(self, rng=None) -> float:
        """Relative mismatch of ``w^H (A v)`` against ``(A w)^H v`` for random vectors."""
        rng = np.random.default_rng(rng)
        v = rng.standard_normal(self.n)
        w = rng.standard_normal(self.n)
        if self.scalar_kind == "complex":
            v = v + 1j * rng.standard_normal(self.n)
            w = w + 1j * rng.standard_normal(self.n)
        lhs = np.vdot(w, self.matvec(v))
        if self.symmetry == "symmetric" and self.scalar_kind == "complex":
            # complex symmetric: w^T A v == (A w)^T v
            lhs = np.dot(w, self.matvec(v))
            rhs = np.dot(self.matvec(w), v)
        else:
            rhs = np.vdot(self.matvec(w), v)
        scale = np.abs(self._csr).max() * np.linalg.norm(v) * np.linalg.norm(w) if self.nnz else 1.0
        return float(abs(lhs - rhs) / max(scale, np.finfo(float).tiny))

    def __repr__(self):
        return (f"SparseMatrix(n={self.n}, nnz={self.nnz}, "
                f"{self.scalar_kind}, {self.symmetry})")


@dataclass(frozen=True)
class Pencil:
    """Matrix pair ``(A, B)`` for ``A x = lambda B x``.

    ``B=None`` stands for the identity. Positive definiteness of ``B`` is
    the caller's responsibility.
    """

    A: SparseMatrix
    B: Optional[SparseMatrix] = None

    def __post_init__(self):
        if self.B is not None and self.B.n != self.A.n:
            raise ValueError(f"pencil dimension mismatch: A is {self.A.n}, B is {self.B.n}")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def is_standard(self) -> bool:
        return self.B is None

    def apply_B(self, v):
        return v if self.B is None else self.B.matvec(v)

    def shifted(self, sigma: float) -> LinearOperator:
        """``A - sigma B`` as a :class:`~scipy.sparse.linalg.LinearOperator`."""
        dtype = np.result_type(self.A.dtype, np.asarray(sigma).dtype,
                               self.B.dtype if self.B is not None else np.float64)
        return LinearOperator(self.A.shape,
                              matvec=lambda v: pencil_shift_apply(self, sigma, v),
                              dtype=dtype)


@dataclass(frozen=True)
class ClusterSpec:
    """Layout of a synthetic diagonal spectrum.

    ``n - sum(counts)`` background eigenvalues are spread uniformly over
    ``base_interval`` (endpoints included). Each cluster ``(center, width,
    count)`` adds ``count`` eigenvalues inside ``[center - width/2, center +
    width/2]``. ``d_lambda``, when given, caps the relative gap
    ``|l[i+1] - l[i]| / |l[i]|`` between neighbours inside every cluster.
    """

    n: int
    base_interval: tuple = (0.0, 1.0)
    clusters: Sequence[tuple] = field(default_factory=tuple)
    d_lambda: Optional[float] = None


def _check_vector(n, v):
    v = np.asarray(v)
    if v.shape[0] != n:
        raise ValueError(f"dimension mismatch: operator is {n}, vector has {v.shape[0]}")
    return v


def matvec(A: SparseMatrix, v) -> np.ndarray:
    """Return ``A @ v``."""
    return A.matvec(_check_vector(A.n, v))


def pencil_shift_apply(P: Pencil, sigma, v) -> np.ndarray:
    """Return ``A v - sigma B v`` (``A v - sigma v`` for the identity ``B``)."""
    v = _check_vector(P.n, v)
    Av = P.A.matvec(v)
    if sigma == 0:
        return Av
    return Av - sigma * P.apply_B(v)


def _tridiag(m):
    return sp.diags([-np.ones(m - 1), 2.0 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1])


def gen_laplacian(nx: int, ny: int = 1, nz: int = 1, cap: int = DEFAULT_SIZE_CAP) -> SparseMatrix:
    """Finite-difference negative Laplacian with Dirichlet boundaries.

    A dimension of size 1 is treated as absent, so ``gen_laplacian(N)`` is
    ``tridiag(-1, 2, -1)`` and ``gen_laplacian(N, N)`` is the 5-point
    stencil with ``4`` on the diagonal.
    """
    dims = [nx, ny, nz]
    if any(int(d) != d or d < 1 for d in dims):
        raise ValueError("grid sizes must be positive integers")
    n = nx * ny * nz
    if n > cap:
        raise ValueError(f"n = {n} exceeds the generator cap {cap}")
    active = [0] + [k for k in (1, 2) if dims[k] > 1]
    # x is the fastest index
    L = sp.csr_matrix((n, n))
    for k in active:
        blocks = [sp.identity(dims[m]) if m != k else _tridiag(dims[m]) for m in (2, 1, 0)]
        L = L + sp.kron(sp.kron(blocks[0], blocks[1]), blocks[2])
    return SparseMatrix(L, "symmetric")


def _cluster_points(center, width, count, rng):
    lo = center - width / 2
    if count == 1:
        return np.array([center])
    base = np.linspace(lo, lo + width, count)
    h = width / (count - 1)
    jitter = rng.uniform(-0.25 * h, 0.25 * h, size=count)
    jitter[0] = abs(jitter[0])
    jitter[-1] = -abs(jitter[-1])
    return base + jitter


def relative_gaps(values) -> np.ndarray:
    values = np.sort(np.asarray(values, dtype=float))
    return np.abs(np.diff(values)) / np.maximum(np.abs(values[:-1]), np.finfo(float).tiny)


def gen_diag_spectrum(spec: ClusterSpec, seed: int = 0,
                      cap: int = DEFAULT_SIZE_CAP) -> SparseMatrix:
    """Diagonal matrix carrying the spectrum described by ``spec``.

    The background is deterministic (``linspace`` over the base interval);
    the seed only perturbs cluster members by at most a quarter of their
    nominal spacing.
    """
    lo, hi = map(float, spec.base_interval)
    if not lo < hi:
        raise ValueError("base interval must satisfy lo < hi")
    if spec.n > cap:
        raise ValueError(f"n = {spec.n} exceeds the generator cap {cap}")
    total = sum(int(c[2]) for c in spec.clusters)
    if total > spec.n:
        raise ValueError(f"cluster counts ({total}) exceed n = {spec.n}")
    rng = np.random.default_rng(seed)
    parts = [np.linspace(lo, hi, spec.n - total)] if spec.n > total else []
    for center, width, count in spec.clusters:
        if center - width / 2 < lo or center + width / 2 > hi:
            raise ValueError(f"cluster at {center} (width {width}) leaves the base interval")
        pts = _cluster_points(float(center), float(width), int(count), rng)
        if spec.d_lambda is not None and count > 1:
            if relative_gaps(pts).max() > spec.d_lambda:
                raise ValueError(f"cluster at {center} violates relative gap {spec.d_lambda}")
        parts.append(pts)
    diag = np.sort(np.concatenate(parts)) if parts else np.empty(0)
    return SparseMatrix(sp.diags(diag, format="csr"), "symmetric")

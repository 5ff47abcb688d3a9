"""Dense-eigendecomposition ground truth for small and medium problems."""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .chebyshev import ChebFilter, filter_eval
from .rational import ContourQuadrature, rational_eval
from .sparse import Pencil, SparseMatrix

__all__ = ["DenseSpectrum", "dense_spectrum", "exact_count", "exact_filter_trace",
           "cholesky_reduced_spectrum", "matrix_digest", "cached_dense_spectrum"]

HERMITIAN_CAP = 8000
GENERAL_CAP = 2000


@dataclass(frozen=True, eq=False)
class DenseSpectrum:
    """All eigenvalues of a matrix or pencil; ascending for Hermitian sources."""

    eigenvalues: np.ndarray
    n: int
    hermitian: bool = True

    def __post_init__(self):
        if len(self.eigenvalues) != self.n:
            raise ValueError("eigenvalue count does not match n")


def dense_spectrum(A) -> DenseSpectrum:
    """Eigenvalues of a :class:`SparseMatrix` or :class:`Pencil`.

    Hermitian matrices and symmetric-definite pencils use LAPACK's
    symmetric drivers (``n <= 8000``); anything else goes through the
    general eigensolver (``n <= 2000``).
    """
    P = A if isinstance(A, Pencil) else Pencil(A)
    n = P.n
    hermitian = P.A.is_hermitian and (P.B is None or P.B.is_hermitian)
    if hermitian:
        if n > HERMITIAN_CAP:
            raise ValueError(f"n = {n} exceeds the dense Hermitian cap {HERMITIAN_CAP}")
        Ad = P.A.toarray()
        if P.B is None:
            w = sla.eigh(Ad, eigvals_only=True)
        else:
            try:
                w = sla.eigh(Ad, P.B.toarray(), eigvals_only=True)
            except np.linalg.LinAlgError as exc:
                raise ValueError(f"B is not positive definite: {exc}") from exc
        return DenseSpectrum(np.sort(w), n, True)
    if n > GENERAL_CAP:
        raise ValueError(f"n = {n} exceeds the dense general cap {GENERAL_CAP}")
    if P.B is None:
        w = sla.eigvals(P.A.toarray())
    else:
        w = sla.eigvals(P.A.toarray(), P.B.toarray())
    return DenseSpectrum(w[np.lexsort((w.imag, w.real))], n, False)


def cholesky_reduced_spectrum(P: Pencil) -> DenseSpectrum:
    """Spectrum of ``L^{-1} A L^{-H}`` with ``B = L L^H``; equals the pencil spectrum."""
    if P.B is None:
        return dense_spectrum(P.A)
    try:
        L = sla.cholesky(P.B.toarray(), lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"B is not positive definite: {exc}") from exc
    X = sla.solve_triangular(L, P.A.toarray(), lower=True)
    C = sla.solve_triangular(L, X.conj().T, lower=True).conj().T
    C = 0.5 * (C + C.conj().T)
    return DenseSpectrum(np.sort(sla.eigh(C, eigvals_only=True)), P.n, True)


def exact_count(spec: DenseSpectrum, interval=None, disk=None) -> int:
    """Eigenvalues in the closed interval ``[a, b]`` or the closed disk ``(center, radius)``."""
    if (interval is None) == (disk is None):
        raise ValueError("give exactly one of interval or disk")
    lam = spec.eigenvalues
    if interval is not None:
        a, b = interval
        lam = np.real(lam)
        return int(np.count_nonzero((lam >= a) & (lam <= b)))
    center, radius = disk
    return int(np.count_nonzero(np.abs(lam - complex(center)) <= radius))


def exact_filter_trace(spec: DenseSpectrum, f, bounds=None) -> float:
    """Trace of the approximate projector, ``sum_i f(lambda_i)``.

    For a :class:`ChebFilter` the eigenvalues are mapped with the filter's
    own affine map (or ``bounds`` when given); every mapped value must lie
    in ``[-1, 1]``. For a :class:`ContourQuadrature` the real part of
    ``chi`` is summed.
    """
    lam = spec.eigenvalues
    if isinstance(f, ContourQuadrature):
        return float(np.sum(np.real(rational_eval(f, lam))))
    if isinstance(f, ChebFilter):
        if bounds is not None:
            amap = bounds.affine
            t = amap.map(np.real(lam))
        else:
            t = (np.real(lam) - f.center) / f.half_span
        if np.any(np.abs(t) > 1.0 + 1e-12):
            worst = float(np.max(np.abs(t)))
            raise ValueError(f"eigenvalues leave [-1, 1] after mapping (max |t| = {worst:.6g}); "
                             "the bounds do not enclose the spectrum")
        return float(np.sum(filter_eval(f, t)))
    raise TypeError(f"unsupported filter type {type(f).__name__}")


def matrix_digest(A) -> str:
    """SHA-256 over the CSR arrays (and those of ``B`` for a pencil)."""
    P = A if isinstance(A, Pencil) else Pencil(A)
    h = hashlib.sha256()
    for M in (P.A, P.B):
        if M is None:
            h.update(b"identity")
            continue
        for arr in (M.row_ptr, M.col_idx, M.values):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(M.symmetry.encode())
    return h.hexdigest()


def cached_dense_spectrum(A, cache_dir) -> DenseSpectrum:
    """:func:`dense_spectrum` with a ``.npy`` sidecar keyed by :func:`matrix_digest`."""
    path = os.path.join(os.fspath(cache_dir), f"spectrum-{matrix_digest(A)[:16]}.npy")
    if os.path.exists(path):
        w = np.load(path)
        return DenseSpectrum(w, len(w), not np.iscomplexobj(w))
    spec = dense_spectrum(A)
    os.makedirs(os.fspath(cache_dir), exist_ok=True)
    np.save(path, spec.eigenvalues)
    return spec

"""Extreme eigenvalue bounds and the affine map onto [-1, 1]."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import aslinearoperator

__all__ = ["SpectralBounds", "AffineMap", "lanczos_bounds", "affine_map", "affine_unmap",
           "as_operator"]

DEFAULT_MARGIN = 0.005
MAX_RESTARTS = 3


def as_operator(op):
    """Wrap a matrix, sparse matrix, :class:`SparseMatrix` or LinearOperator."""
    return aslinearoperator(op)


def _min_span(lmax):
    return 1e-8 * max(1.0, abs(lmax))


@dataclass(frozen=True)
class SpectralBounds:
    """Interval meant to enclose the whole spectrum of an operator.

    ``ritz_min``/``ritz_max`` are the raw extreme Ritz values and
    ``residuals`` the Lanczos residual bounds ``|beta_m s_m|`` of the
    corresponding Ritz pairs.
    """

    lmin: float
    lmax: float
    margin_applied: float = 0.0
    ritz_min: float = float("nan")
    ritz_max: float = float("nan")
    residuals: tuple = (0.0, 0.0)
    steps: int = 0
    restarts: int = 0

    def __post_init__(self):
        if not self.lmin < self.lmax:
            raise ValueError(f"bounds must satisfy lmin < lmax, got [{self.lmin}, {self.lmax}]")

    @classmethod
    def exact(cls, lmin, lmax):
        """Bounds taken verbatim, with the minimum-span safeguard."""
        lmin, lmax = float(lmin), float(lmax)
        span = _min_span(lmax)
        if lmax - lmin < span:
            mid = 0.5 * (lmin + lmax)
            lmin, lmax = mid - span / 2, mid + span / 2
        return cls(lmin, lmax, 0.0, lmin, lmax)

    @property
    def affine(self) -> "AffineMap":
        return AffineMap.from_bounds(self.lmin, self.lmax)

    def contains(self, values) -> bool:
        values = np.asarray(values)
        return bool(np.all((values >= self.lmin) & (values <= self.lmax)))

    def as_dict(self):
        return {"lmin": self.lmin, "lmax": self.lmax, "margin_applied": self.margin_applied,
                "ritz_min": self.ritz_min, "ritz_max": self.ritz_max,
                "residuals": list(self.residuals), "steps": self.steps,
                "restarts": self.restarts}


@dataclass(frozen=True)
class AffineMap:
    """``t -> (t - center) / half_span``; maps ``[lmin, lmax]`` onto ``[-1, 1]``."""

    center: float
    half_span: float

    def __post_init__(self):
        if not self.half_span > 0:
            raise ValueError(f"half_span must be positive, got {self.half_span}")

    @classmethod
    def from_bounds(cls, lmin, lmax):
        return cls((lmax + lmin) / 2, (lmax - lmin) / 2)

    def map(self, t):
        if not np.isscalar(t):
            t = np.asarray(t)
        return (t - self.center) / self.half_span

    def unmap(self, s):
        if not np.isscalar(s):
            s = np.asarray(s)
        return s * self.half_span + self.center


def affine_map(t, amap: AffineMap):
    return amap.map(t)


def affine_unmap(s, amap: AffineMap):
    return amap.unmap(s)


def _start_vector(rng, n, dtype, basis):
    for _ in range(4):
        v = rng.standard_normal(n)
        if np.issubdtype(dtype, np.complexfloating):
            v = v + 1j * rng.standard_normal(n)
        if basis:
            Q = np.array(basis).T
            v = v - Q @ (Q.conj().T @ v)
            v = v - Q @ (Q.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-10 * np.sqrt(n):
            return v / nrm
    return None


def lanczos_bounds(op, steps=None, seed=0, margin=DEFAULT_MARGIN) -> SpectralBounds:
    """Enclose the spectrum of a Hermitian operator by Lanczos.

    Runs ``steps`` Lanczos iterations with full reorthogonalization from a
    seeded random start. The extreme Ritz values are pushed outward by
    ``margin * (theta_max - theta_min)`` plus the residual bound of each
    extreme Ritz pair.

    Parameters
    ----------
    op : matrix-like
        Hermitian operator: dense array, scipy sparse matrix,
        :class:`~speccount.sparse.SparseMatrix` or ``LinearOperator``.
    steps : int, optional
        Number of Lanczos steps, default ``min(n, 60)``.
    seed : int
        Seed of the start vector (and of restart vectors).
    margin : float
        Relative widening of the Ritz interval.

    Notes
    -----
    A breakdown (``beta == 0``) means an invariant subspace was found. The
    iteration then continues from a fresh seeded vector orthogonal to the
    basis, at most three times; after that the bounds are returned from
    what has been computed and a ``RuntimeWarning`` is issued.
    """
    A = as_operator(op)
    n = A.shape[0]
    if steps is None:
        steps = min(n, 60)
    steps = int(min(steps, n))
    if steps < 1:
        raise ValueError("steps must be positive")
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    rng = np.random.default_rng(seed)
    dtype = np.result_type(A.dtype, np.float64)
    basis = []
    alpha, beta = [], []
    restarts = 0
    q = _start_vector(rng, n, dtype, basis)
    exhausted = False
    while len(basis) < steps:
        basis.append(q)
        w = A.matvec(q)
        a = np.vdot(q, w).real
        alpha.append(a)
        Q = np.array(basis).T
        w = w - Q @ (Q.conj().T @ w)
        w = w - Q @ (Q.conj().T @ w)
        b = np.linalg.norm(w)
        if len(basis) == steps:
            beta.append(b)
            break
        scale = max(abs(a), max(abs(x) for x in alpha), 1.0)
        if b <= 1e-12 * scale:
            if len(basis) == n:
                beta.append(0.0)
                break
            if restarts == MAX_RESTARTS:
                exhausted = True
                beta.append(0.0)
                break
            q = _start_vector(rng, n, dtype, basis)
            if q is None:
                beta.append(0.0)
                break
            restarts += 1
            beta.append(0.0)
        else:
            beta.append(b)
            q = w / b
    m = len(alpha)
    if exhausted:
        warnings.warn(f"Lanczos stopped after {MAX_RESTARTS} restarts at {m} steps; "
                      "bounds come from the invariant subspaces found", RuntimeWarning)
    d = np.array(alpha)
    e = np.array(beta[:m - 1])
    theta, S = eigh_tridiagonal(d, e)
    last = beta[m - 1] if len(beta) >= m else 0.0
    res = np.abs(last * S[-1, :])
    tmin, tmax = float(theta[0]), float(theta[-1])
    widen = margin * (tmax - tmin)
    lmin = tmin - widen - float(res[0])
    lmax = tmax + widen + float(res[-1])
    span = _min_span(lmax)
    if lmax - lmin < span:
        mid = 0.5 * (lmin + lmax)
        lmin, lmax = mid - span / 2, mid + span / 2
    return SpectralBounds(lmin, lmax, margin, tmin, tmax, (float(res[0]), float(res[-1])),
                          m, restarts)

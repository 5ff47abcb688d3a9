"""Shifted linear solves ``(A - z I) y = v`` and ``(A - z B) y = v``."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.linalg as sla

from .sparse import Pencil, SparseMatrix

__all__ = [
    "SolverConfig",
    "ShiftedOperator",
    "DenseLU",
    "GMRESResult",
    "SolverError",
    "dense_lu_factor",
    "dense_lu_solve",
    "gmres",
    "DENSE_CAP",
]

DENSE_CAP = 8000
SOLVER_METHODS = ("dense_lu", "gmres")


class SolverError(RuntimeError):
    """Singular shift, breakdown, or an unusable solve."""


@dataclass(frozen=True)
class SolverConfig:
    method: str = "dense_lu"
    rel_residual_tol: float = 1e-2
    restart: int = 20
    max_iters: int = 200

    def __post_init__(self):
        if self.method not in SOLVER_METHODS:
            raise ValueError(f"unknown solver {self.method!r}; expected one of {SOLVER_METHODS}")
        if not 0 < self.rel_residual_tol < 1:
            raise ValueError("rel_residual_tol must be in (0, 1)")
        if self.restart < 1:
            raise ValueError("restart must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def as_dict(self):
        return {"method": self.method, "rel_residual_tol": self.rel_residual_tol,
                "restart": self.restart, "max_iters": self.max_iters}


@dataclass(frozen=True)
class ShiftedOperator:
    """``A - z I`` or ``A - z B`` applied without forming the matrix."""

    base: Union[SparseMatrix, Pencil]
    z: complex

    @property
    def pencil(self) -> Pencil:
        return self.base if isinstance(self.base, Pencil) else Pencil(self.base)

    @property
    def form(self) -> str:
        return "A_minus_zI" if self.pencil.is_standard else "A_minus_zB"

    @property
    def n(self) -> int:
        return self.base.n

    def apply(self, v):
        P = self.pencil
        return P.A.matvec(v) - self.z * P.apply_B(v)

    def to_dense(self) -> np.ndarray:
        P = self.pencil
        M = P.A.toarray().astype(complex)
        if P.B is None:
            M[np.diag_indices_from(M)] -= self.z
        else:
            M -= self.z * P.B.toarray()
        return M


@dataclass(frozen=True, eq=False)
class DenseLU:
    """Partial-pivoted LU factors of a shifted operator; safe to share."""

    lu: np.ndarray
    piv: np.ndarray
    z: complex


def dense_lu_factor(op: ShiftedOperator, cap: int = DENSE_CAP) -> DenseLU:
    if op.n > cap:
        raise SolverError(f"n = {op.n} exceeds the dense cap {cap}")
    M = op.to_dense()
    with warnings.catch_warnings():
        # singular pivots are reported below as SolverError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=True)
    if np.any(np.diag(lu) == 0):
        raise SolverError(f"exactly singular pivot for shift {op.z}")
    return DenseLU(lu, piv, op.z)


def dense_lu_solve(handle: DenseLU, rhs) -> np.ndarray:
    return sla.lu_solve((handle.lu, handle.piv), np.asarray(rhs, dtype=complex))


class GMRESResult(NamedTuple):
    solution: np.ndarray
    rel_residual: float
    iters: int


def _givens(a, b):
    # complex rotation with c real, zeroing b against a
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    t = np.hypot(abs(a), abs(b))
    c = abs(a) / t
    s = (a / abs(a)) * np.conj(b) / t
    return c, s


def gmres(op: ShiftedOperator, rhs, cfg: SolverConfig = SolverConfig(method="gmres")) -> GMRESResult:
    """Restarted GMRES with modified Gram-Schmidt, zero initial guess.

    Stops when ``||r_k|| / ||rhs|| <= cfg.rel_residual_tol`` or after
    ``cfg.max_iters`` inner iterations in total. The returned residual is
    recomputed from the returned solution, not taken from the Arnoldi
    recurrence; convergence is also confirmed on that true residual.

    Raises
    ------
    SolverError
        For a zero right-hand side or non-finite arithmetic.
    """
    b = np.asarray(rhs, dtype=complex)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        raise SolverError("zero right-hand side")
    tol = cfg.rel_residual_tol
    x = np.zeros_like(b)
    r = b.copy()
    rnorm = bnorm
    iters = 0
    m = cfg.restart
    while iters < cfg.max_iters and rnorm / bnorm > tol:
        V = np.zeros((m + 1, len(b)), dtype=complex)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = rnorm
        V[0] = r / rnorm
        k = 0
        for k in range(m):
            w = op.apply(V[k])
            for i in range(k + 1):
                H[i, k] = np.vdot(V[i], w)
                w = w - H[i, k] * V[i]
            H[k + 1, k] = np.linalg.norm(w)
            if not np.all(np.isfinite(H[:k + 2, k])):
                raise SolverError("non-finite value in GMRES")
            happy = abs(H[k + 1, k]) <= 1e-14 * abs(g[0])
            if not happy:
                V[k + 1] = w / H[k + 1, k]
            for i in range(k):
                hi, hi1 = H[i, k], H[i + 1, k]
                H[i, k] = cs[i] * hi + sn[i] * hi1
                H[i + 1, k] = -np.conj(sn[i]) * hi + cs[i] * hi1
            cs[k], sn[k] = _givens(H[k, k], H[k + 1, k])
            H[k, k] = cs[k] * H[k, k] + sn[k] * H[k + 1, k]
            H[k + 1, k] = 0.0
            g[k + 1] = -np.conj(sn[k]) * g[k]
            g[k] = cs[k] * g[k]
            iters += 1
            if happy or abs(g[k + 1]) / bnorm <= tol or iters >= cfg.max_iters:
                break
        kk = k + 1
        if H[kk - 1, kk - 1] == 0:
            raise SolverError(f"GMRES breakdown for shift {op.z}")
        y = sla.solve_triangular(H[:kk, :kk], g[:kk])
        x = x + V[:kk].T @ y
        r = b - op.apply(x)
        rnorm = np.linalg.norm(r)
        if not np.isfinite(rnorm):
            raise SolverError("non-finite residual in GMRES")
        if happy:
            break
    return GMRESResult(x, float(rnorm / bnorm), iters)

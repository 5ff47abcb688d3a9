"""Contour quadratures for the Cauchy-integral spectral projector.

With ``z(theta) = c + r exp(i theta)`` the projector
``-(1/2 pi i) \\oint (A - z)^{-1} dz`` becomes
``-(1/2 pi) \\int r exp(i theta) (A - z)^{-1} d theta``. Gauss-Legendre
nodes on the upper half circle (``theta = pi/2 (1 - t)``) give weights
``-(w r / 4) exp(i theta)``; the lower half is the mirror image. At the
center every term contributes ``w / 4`` so the rule reproduces 1 exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContourQuadrature",
    "gauss_legendre",
    "legendre_rule",
    "build_halfcircle_quadrature",
    "build_fullcircle_quadrature",
    "rational_eval",
    "rational_eval_real",
    "PoleCollision",
]

MAX_GAUSS_POINTS = 64


class PoleCollision(ValueError):
    """Evaluation point coincides with a quadrature pole."""


def legendre_rule(m):
    """Gauss-Legendre nodes and weights on ``[-1, 1]`` by Newton iteration.

    Nodes are returned in ascending order. No upper limit on ``m``.
    """
    m = int(m)
    if m < 1:
        raise ValueError("need at least one node")
    k = np.arange(1, m + 1)
    # Tricomi's initial guess, descending in k
    x = np.cos(np.pi * (k - 0.25) / (m + 0.5)) * (1 - (m - 1) / (8.0 * m ** 3))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for j in range(2, m + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = m * (x * p1 - p0) / (x * x - 1)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, m + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = m * (x * p1 - p0) / (x * x - 1)
    w = 2.0 / ((1 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def gauss_legendre(m):
    """Gauss-Legendre rule with ``1 <= m <= 64`` points."""
    if not 1 <= m <= MAX_GAUSS_POINTS:
        raise ValueError(f"m must be in [1, {MAX_GAUSS_POINTS}], got {m}")
    return legendre_rule(m)


@dataclass(frozen=True, eq=False)
class ContourQuadrature:
    """Poles ``z_j`` and weights ``w_j`` of ``chi(l) = sum_j w_j / (l - z_j)``.

    For ``kind='halfcircle_conjugate'`` the first ``n_upper`` entries are the
    upper-half-plane poles and the rest their conjugates in the same order.
    """

    poles: np.ndarray
    weights: np.ndarray
    kind: str
    center: complex
    radius: float

    @property
    def n_c(self) -> int:
        return len(self.poles)

    @property
    def n_upper(self) -> int:
        return len(self.poles) // 2

    @property
    def upper(self):
        """Upper-half poles and weights."""
        m = self.n_upper
        return self.poles[:m], self.weights[:m]

    def summary(self):
        return {"filter": "rational", "kind": self.kind, "n_c": self.n_c,
                "n_upper": self.n_upper, "center": [float(np.real(self.center)),
                                                    float(np.imag(self.center))],
                "radius": self.radius}

    def pole_table(self):
        return [(float(z.real), float(z.imag), float(w.real), float(w.imag))
                for z, w in zip(self.poles, self.weights)]


def _half_rule(m):
    t, w = gauss_legendre(m)
    theta = 0.5 * np.pi * (1.0 - t)
    return theta, w


def build_halfcircle_quadrature(a, b, m) -> ContourQuadrature:
    """Circle with diameter ``[a, b]``: ``m`` upper poles plus their conjugates."""
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    theta, w = _half_rule(m)
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    e = np.exp(1j * theta)
    z = c + r * e
    omega = -(w * r / 4.0) * e
    poles = np.concatenate([z, z.conj()])
    weights = np.concatenate([omega, omega.conj()])
    return ContourQuadrature(poles, weights, "halfcircle_conjugate", complex(c), float(r))


def build_fullcircle_quadrature(center, radius, m) -> ContourQuadrature:
    """Full circle around a complex ``center``: ``m`` poles in total, ``m`` even.

    ``m/2`` Gauss points sit on the upper half and are mirrored across the
    horizontal line through the center.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and at least 2, got {m}")
    theta, w = _half_rule(m // 2)
    c = complex(center)
    e = np.exp(1j * theta)
    ec = e.conj()
    poles = np.concatenate([c + radius * e, c + radius * ec])
    weights = np.concatenate([-(w * radius / 4.0) * e, -(w * radius / 4.0) * ec])
    return ContourQuadrature(poles, weights, "fullcircle", c, float(radius))


def rational_eval(q: ContourQuadrature, lam):
    """``chi(lam) = sum_j w_j / (lam - z_j)`` for scalar or array ``lam``."""
    scalar = np.isscalar(lam)
    lam = np.asarray(lam, dtype=complex)
    diff = lam[..., None] - q.poles
    if np.any(np.abs(diff) <= 1e-14 * q.radius):
        raise PoleCollision("evaluation point coincides with a quadrature pole")
    val = np.sum(q.weights / diff, axis=-1)
    return complex(val) if scalar else val


def rational_eval_real(q: ContourQuadrature, lam):
    """Real part of :func:`rational_eval` for real arguments."""
    val = rational_eval(q, lam)
    return float(np.real(val)) if np.isscalar(lam) else np.real(val)

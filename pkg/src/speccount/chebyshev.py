"""Chebyshev expansions of step functions and their damped variants.

A filter approximates the indicator of ``[a_hat, b_hat]`` on ``[-1, 1]``
by ``sum_j d_j gamma_j T_j(t)`` with damping factors ``d_j`` (all ones,
Jackson, or Lanczos sigma). High- and low-pass filters are the special
cases ``b_hat = 1`` and ``a_hat = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bounds import SpectralBounds, as_operator

__all__ = [
    "ChebFilter",
    "cheb_coeffs",
    "jackson_coeffs",
    "jackson_coeffs_long",
    "lanczos_sigma_coeffs",
    "make_filter",
    "filter_eval",
    "filter_apply",
    "filter_quadratic_form",
    "l2_error_bound",
    "l2_tail",
    "l2_tail_exact",
    "weighted_l2_error",
    "tail_report",
    "DEFAULT_DEGREE",
]

DAMPINGS = ("none", "jackson", "lanczos_sigma")
KINDS = ("mid", "high", "low")
DEFAULT_DEGREE = {"mid": 100, "high": 50, "low": 50}
# slack for endpoints that land a rounding error outside [-1, 1]
_EDGE_SLACK = 1e-12


def cheb_coeffs(a_hat, b_hat, p):
    """Chebyshev coefficients of the indicator of ``[a_hat, b_hat]``.

    Returns ``gamma[0..p]`` with ``gamma_0 = (acos a - acos b) / pi`` and
    ``gamma_j = 2 (sin(j acos a) - sin(j acos b)) / (pi j)``.
    """
    if not (-1.0 <= a_hat <= 1.0 and -1.0 <= b_hat <= 1.0):
        raise ValueError(f"endpoints must lie in [-1, 1], got [{a_hat}, {b_hat}]")
    if not a_hat < b_hat:
        raise ValueError(f"need a_hat < b_hat, got [{a_hat}, {b_hat}]")
    if p < 0:
        raise ValueError("degree must be nonnegative")
    ta, tb = np.arccos(a_hat), np.arccos(b_hat)
    j = np.arange(1, p + 1)
    gamma = np.empty(p + 1)
    gamma[0] = (ta - tb) / np.pi
    gamma[1:] = 2.0 / np.pi * (np.sin(j * ta) - np.sin(j * tb)) / j
    return gamma


def jackson_coeffs(p):
    """Jackson damping factors ``g_0^p .. g_p^p`` (short form)."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    alpha = np.pi / (p + 2)
    j = np.arange(p + 1)
    return (np.sin((j + 1) * alpha) / ((p + 2) * np.sin(alpha))
            + (1 - (j + 1) / (p + 2)) * np.cos(j * alpha))


def jackson_coeffs_long(p):
    """Jackson factors in their original form; kept as a cross-check."""
    alpha = np.pi / (p + 2)
    j = np.arange(p + 1)
    return ((1 - j / (p + 2)) * np.sin(alpha) * np.cos(j * alpha)
            + np.cos(alpha) * np.sin(j * alpha) / (p + 2)) / np.sin(alpha)


def lanczos_sigma_coeffs(p):
    """Lanczos sigma factors ``sin(j theta) / (j theta)``, ``theta = pi / (p + 1)``."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    theta = np.pi / (p + 1)
    sigma = np.ones(p + 1)
    j = np.arange(1, p + 1)
    sigma[1:] = np.sin(j * theta) / (j * theta)
    return sigma


def _damping(kind, p):
    if kind == "none":
        return np.ones(p + 1)
    if kind == "jackson":
        return jackson_coeffs(p)
    if kind == "lanczos_sigma":
        return lanczos_sigma_coeffs(p)
    raise ValueError(f"unknown damping {kind!r}; expected one of {DAMPINGS}")


@dataclass(frozen=True, eq=False)
class ChebFilter:
    """Damped Chebyshev approximation of a step function.

    ``center`` and ``half_span`` describe the affine map from the original
    spectrum to ``[-1, 1]``; the defaults leave the argument unchanged.
    """

    degree: int
    a_hat: float
    b_hat: float
    damping: str
    gamma: np.ndarray
    damped_gamma: np.ndarray
    kind: str = "mid"
    center: float = 0.0
    half_span: float = 1.0

    @classmethod
    def build(cls, a_hat, b_hat, p, damping="none", kind="mid", center=0.0, half_span=1.0):
        gamma = cheb_coeffs(a_hat, b_hat, p)
        damped = gamma * _damping(damping, p)
        gamma.flags.writeable = False
        damped.flags.writeable = False
        return cls(int(p), float(a_hat), float(b_hat), damping, gamma, damped, kind,
                   float(center), float(half_span))

    def target(self, t_hat):
        """The step function being approximated (closed interval)."""
        t_hat = np.asarray(t_hat, dtype=float)
        return ((t_hat >= self.a_hat) & (t_hat <= self.b_hat)).astype(float)

    def summary(self):
        return {"filter": "chebyshev", "kind": self.kind, "degree": self.degree,
                "damping": self.damping, "a_hat": self.a_hat, "b_hat": self.b_hat,
                "center": self.center, "half_span": self.half_span}


def make_filter(kind, a, b_or_sigma, bounds: SpectralBounds, p=None, damping="none") -> ChebFilter:
    """Build a mid-, high- or low-pass filter in the original coordinates.

    Parameters
    ----------
    kind : {'mid', 'high', 'low'}
        ``'mid'`` targets ``[a, b]``; ``'high'`` targets ``t >= sigma`` and
        ``'low'`` targets ``t <= sigma`` (``a`` is ignored for these two).
    a, b_or_sigma : float
        Interval endpoints, or the threshold ``sigma`` in second position.
    bounds : SpectralBounds
        Enclosure of the spectrum defining the map to ``[-1, 1]``.
    p : int, optional
        Degree; defaults to 100 for mid-pass and 50 otherwise.
    damping : {'none', 'jackson', 'lanczos_sigma'}

    Notes
    -----
    Mid-pass endpoints beyond the bounds are clipped to them. A high/low
    threshold must map into ``[-1, 1]`` (up to rounding).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown filter kind {kind!r}; expected one of {KINDS}")
    if p is None:
        p = DEFAULT_DEGREE[kind]
    amap = bounds.affine
    if kind == "mid":
        if not a < b_or_sigma:
            raise ValueError(f"need a < b, got [{a}, {b_or_sigma}]")
        a_hat = float(np.clip(amap.map(a), -1.0, 1.0))
        b_hat = float(np.clip(amap.map(b_or_sigma), -1.0, 1.0))
        if not a_hat < b_hat:
            raise ValueError(f"interval [{a}, {b_or_sigma}] does not meet the bounds "
                             f"[{bounds.lmin}, {bounds.lmax}]")
    else:
        s_hat = amap.map(b_or_sigma)
        if abs(s_hat) > 1.0 + _EDGE_SLACK:
            raise ValueError(f"threshold {b_or_sigma} maps to {s_hat}, outside [-1, 1]")
        s_hat = float(np.clip(s_hat, -1.0, 1.0))
        a_hat, b_hat = (s_hat, 1.0) if kind == "high" else (-1.0, s_hat)
        if a_hat == b_hat:
            raise ValueError(f"threshold {b_or_sigma} leaves an empty pass band")
    return ChebFilter.build(a_hat, b_hat, p, damping, kind, amap.center, amap.half_span)


def filter_eval(f: ChebFilter, t_hat):
    """Evaluate the filter at mapped points ``t_hat`` in ``[-1, 1]``.

    Uses the forward three-term recurrence, matching :func:`filter_apply`.
    Accepts scalars or arrays.
    """
    scalar = np.isscalar(t_hat)
    t = np.asarray(t_hat, dtype=float)
    if np.any(np.abs(t) > 1.0 + _EDGE_SLACK):
        raise ValueError("filter arguments must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    c = f.damped_gamma
    t_prev = np.ones_like(t)
    acc = c[0] * t_prev
    if f.degree >= 1:
        t_cur = t.copy()
        acc = acc + c[1] * t_cur
        for j in range(2, f.degree + 1):
            t_prev, t_cur = t_cur, 2.0 * t * t_cur - t_prev
            acc = acc + c[j] * t_cur
    return float(acc) if scalar else acc


def _mapped(op, f):
    A = as_operator(op)
    c, h = f.center, f.half_span
    if c == 0.0 and h == 1.0:
        return A.matvec, A.shape[0]
    return (lambda x: (A.matvec(x) - c * x) / h), A.shape[0]


def filter_apply(op, f: ChebFilter, v):
    """Return ``psi_p(op) v`` using exactly ``p`` products with ``op``."""
    L, n = _mapped(op, f)
    v = np.asarray(v)
    if v.shape[0] != n:
        raise ValueError(f"dimension mismatch: operator is {n}, vector has {v.shape[0]}")
    c = f.damped_gamma
    out = c[0] * v
    if f.degree == 0:
        return out
    w_prev, w = v, L(v)
    out = out + c[1] * w
    for j in range(2, f.degree + 1):
        w_prev, w = w, 2.0 * L(w) - w_prev
        out = out + c[j] * w
    return out


def filter_quadratic_form(op, f: ChebFilter, v):
    """Return ``v^H psi_p(op) v`` streaming ``gamma_j (v^H w_j)`` through the recurrence.

    Only two work vectors are kept; the cost is ``p`` operator products.
    """
    L, n = _mapped(op, f)
    v = np.asarray(v)
    if v.shape[0] != n:
        raise ValueError(f"dimension mismatch: operator is {n}, vector has {v.shape[0]}")
    c = f.damped_gamma
    acc = c[0] * np.vdot(v, v)
    if f.degree == 0:
        return acc
    w_prev, w = v, L(v)
    acc += c[1] * np.vdot(v, w)
    for j in range(2, f.degree + 1):
        w_prev, w = w, 2.0 * L(w) - w_prev
        acc += c[j] * np.vdot(v, w)
    return acc


def l2_error_bound(p):
    """Upper bound ``4 pi / (3 (p + 1))`` on the squared weighted L2 error."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    return 4.0 * np.pi / (3.0 * (p + 1))


def l2_tail(a_hat, b_hat, p, J=10**6):
    """Truncated tail ``(pi/2) sum_{j=p+1}^{J} gamma_j^2``."""
    ta, tb = np.arccos(a_hat), np.arccos(b_hat)
    total = 0.0
    chunk = 1 << 18
    for start in range(p + 1, J + 1, chunk):
        j = np.arange(start, min(start + chunk, J + 1), dtype=float)
        g = 2.0 / np.pi * (np.sin(j * ta) - np.sin(j * tb)) / j
        total += np.dot(g, g)
    return np.pi / 2 * total


def _cos_series(z):
    """``sum_{j>=1} cos(j z) / j^2`` for real ``z`` (closed form)."""
    z = np.mod(z, 2 * np.pi)
    return np.pi ** 2 / 6 - np.pi * z / 2 + z ** 2 / 4


def l2_tail_exact(a_hat, b_hat, p):
    """Infinite tail ``(pi/2) sum_{j>p} gamma_j^2`` without truncation.

    Uses ``sin x sin y = (cos(x - y) - cos(x + y)) / 2`` and the closed
    form of ``sum cos(j z) / j^2`` for the full series, then subtracts the
    first ``p`` terms.
    """
    ta, tb = np.arccos(a_hat), np.arccos(b_hat)

    def s2(x, y):
        # sum_{j>=1} sin(jx) sin(jy) / j^2
        return 0.5 * (_cos_series(x - y) - _cos_series(x + y))

    full = s2(ta, ta) + s2(tb, tb) - 2.0 * s2(ta, tb)
    j = np.arange(1, p + 1, dtype=float)
    head = np.sum(((np.sin(j * ta) - np.sin(j * tb)) / j) ** 2)
    return np.pi / 2 * (2.0 / np.pi) ** 2 * (full - head)


@lru_cache(maxsize=16)
def _cached_rule(m):
    from .rational import legendre_rule

    x, w = legendre_rule(m)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def weighted_l2_error(f: ChebFilter, nodes=4096):
    """Squared Chebyshev-weighted L2 distance between ``f`` and its step target.

    The substitution ``t = cos(theta)`` removes the weight; the integral
    over ``[0, pi]`` is split at the two jumps and the ``nodes``
    Gauss-Legendre points are shared equally between the smooth pieces.
    """
    tb, ta = np.arccos(f.b_hat), np.arccos(f.a_hat)
    breaks = [0.0, tb, ta, np.pi]
    pieces = [(lo, hi) for lo, hi in zip(breaks[:-1], breaks[1:]) if hi - lo > 0]
    x, w = _cached_rule(max(1, nodes // len(pieces)))
    total = 0.0
    for lo, hi in pieces:
        theta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        inside = 1.0 if (lo >= tb and hi <= ta) else 0.0
        err = filter_eval(f, np.cos(theta)) - inside
        total += 0.5 * (hi - lo) * np.dot(w, err ** 2)
    return total


def tail_report(f: ChebFilter, grid=2001, near=0.02):
    """Maximum ``|psi_p - h|`` on five regions of ``[-1, 1]``.

    Regions: left of ``a_hat``, around ``a_hat``, inside, around ``b_hat``
    and right of ``b_hat``; "around" means within ``near * 2`` (a fraction
    of the length of ``[-1, 1]``) of the edge. Empty regions report 0.
    """
    if grid < 16:
        raise ValueError("grid must have at least 16 points")
    t = np.linspace(-1.0, 1.0, grid)
    err = np.abs(filter_eval(f, t) - f.target(t))
    d = 2.0 * near
    a, b = f.a_hat, f.b_hat
    masks = {
        "outside_left": t < a - d,
        "near_a": np.abs(t - a) <= d,
        "inside": (t > a + d) & (t < b - d),
        "near_b": np.abs(t - b) <= d,
        "outside_right": t > b + d,
    }
    return {k: float(err[m].max()) if m.any() else 0.0 for k, m in masks.items()}

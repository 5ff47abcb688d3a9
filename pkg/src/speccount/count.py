"""Eigenvalue counts from filtered stochastic trace estimates.

Polynomial counts trace a Chebyshev approximation of the interval
indicator; rational counts trace a contour-quadrature resolvent sum.
Eigenvalues sitting exactly on an endpoint contribute about 1/2 to
either filter, while :func:`speccount.oracle.exact_count` counts the
closed interval.
"""
from __future__ import annotations

import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .bounds import SpectralBounds, lanczos_bounds
from .chebyshev import filter_quadratic_form, make_filter
from .rational import ContourQuadrature, build_fullcircle_quadrature, build_halfcircle_quadrature
from .solvers import (SolverConfig, SolverError, ShiftedOperator, dense_lu_factor,
                      dense_lu_solve, gmres)
from .sparse import Pencil, SparseMatrix
from .trace import SampleConfig, TraceRun, rq_estimate, sample_vector

__all__ = [
    "CountReport",
    "M0Suggestion",
    "count_poly_standard",
    "count_poly_generalized",
    "count_rational",
    "count_rational_swapped",
    "count_rational_nonsymmetric",
    "suggest_subspace_size",
    "nearest_int",
    "SOLVER_FLOOR",
]

SCHEMA_VERSION = 1
# achieved relative residual above which a solve is treated as failed
SOLVER_FLOOR = 1e-1


def nearest_int(x) -> int:
    """Round half away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass
class CountReport:
    """Result of one count, serializable with :meth:`to_json`.

    ``sub_reports`` holds the threshold counts of a generalized run (or
    the inner and enlarged counts of a subspace suggestion); ``partials``
    holds per-pole entries of the swapped-loop rational count.
    """

    estimate: float
    method: dict
    trace_run: TraceRun
    bounds: Optional[dict] = None
    config_echo: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0
    sub_reports: dict = field(default_factory=dict)
    partials: list = field(default_factory=list)

    @property
    def rounded(self) -> int:
        return nearest_int(self.estimate)

    @property
    def n_v_used(self) -> int:
        return self.trace_run.n_v

    @property
    def converged_at(self):
        return self.trace_run.converged_at

    def to_dict(self, timing=True) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "estimate": float(self.estimate),
            "rounded": self.rounded,
            "method": self.method,
            "n_v_used": self.n_v_used,
            "converged_at": self.converged_at,
            "bounds": self.bounds,
            "per_sample": [float(x) for x in self.trace_run.quotients],
            "config_echo": self.config_echo,
        }
        if timing:
            out["wall_time_ms"] = self.wall_time_ms
        if self.sub_reports:
            out["sub_reports"] = {k: r.to_dict(timing) for k, r in self.sub_reports.items()}
        if self.partials:
            out["partials"] = self.partials
        return out

    def to_json(self, timing=True, indent=None) -> str:
        return json.dumps(self.to_dict(timing), indent=indent)


def _elapsed_ms(t0):
    return round((time.perf_counter() - t0) * 1000.0, 3)


def _check_interval(interval):
    a, b = (float(x) for x in interval)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    return a, b


def count_poly_standard(A: SparseMatrix, interval, p: int = 100, damping: str = "none",
                        cfg: SampleConfig = SampleConfig(),
                        bounds: Optional[SpectralBounds] = None) -> CountReport:
    """Count eigenvalues of a symmetric/Hermitian ``A`` in ``[a, b]`` with a mid-pass filter.

    Bounds come from :func:`lanczos_bounds` when not given. Each sample
    costs ``p`` products with ``A``.
    """
    t0 = time.perf_counter()
    if not A.is_hermitian:
        raise ValueError("polynomial counts need a symmetric or Hermitian matrix")
    a, b = _check_interval(interval)
    if bounds is None:
        bounds = lanczos_bounds(A, seed=cfg.seed)
    if b < bounds.lmin or a > bounds.lmax:
        raise ValueError(f"interval [{a}, {b}] lies outside the bounds "
                         f"[{bounds.lmin}, {bounds.lmax}]")
    f = make_filter("mid", a, b, bounds, p, damping)
    M = A.csr
    run = rq_estimate(lambda v: filter_quadratic_form(M, f, v), A.n, cfg)
    return CountReport(
        estimate=run.estimate,
        method={"name": "poly", "interval": [a, b], **f.summary()},
        trace_run=run,
        bounds=bounds.as_dict(),
        config_echo={"sampling": cfg.as_dict()},
        wall_time_ms=_elapsed_ms(t0),
    )


def count_poly_generalized(P: Pencil, interval, p: int = 100, damping: str = "none",
                           cfg: SampleConfig = SampleConfig(),
                           bounds_a: Optional[SpectralBounds] = None,
                           bounds_b: Optional[SpectralBounds] = None) -> CountReport:
    """Count eigenvalues of the pencil ``(A, B)`` in ``[a, b]`` as ``mu_a - mu_b``.

    ``mu_s`` is the number of nonnegative eigenvalues of ``A - s B``,
    estimated with a high-pass filter at 0 after bounding ``A - s B``.
    Both traces use the same sample vectors. ``B`` must be positive
    definite; this is not checked.
    """
    t0 = time.perf_counter()
    a, b = _check_interval(interval)
    op_a, op_b = P.shifted(a), P.shifted(b)
    if bounds_a is None:
        bounds_a = lanczos_bounds(op_a, seed=cfg.seed)
    if bounds_b is None:
        bounds_b = lanczos_bounds(op_b, seed=cfg.seed)
    f_a = make_filter("high", None, 0.0, bounds_a, p, damping)
    f_b = make_filter("high", None, 0.0, bounds_b, p, damping)

    def qform(v):
        qa = filter_quadratic_form(op_a, f_a, v)
        qb = filter_quadratic_form(op_b, f_b, v)
        return qa - qb, (qa, qb)

    run = rq_estimate(qform, P.n, cfg)
    scale = cfg.scale(P.n)
    subs = {}
    for i, (name, f, bnd) in enumerate((("mu_a", f_a, bounds_a), ("mu_b", f_b, bounds_b))):
        vals = [complex(x[i]) for x in run.aux]
        sub = TraceRun.from_quotients([scale * x.real for x in vals], None,
                                      [scale * x.imag for x in vals])
        subs[name] = CountReport(sub.estimate, {"name": "poly_threshold", **f.summary()},
                                 sub, bnd.as_dict())
    run.aux = []
    return CountReport(
        estimate=run.estimate,
        method={"name": "poly_generalized", "interval": [a, b], "degree": p,
                "damping": damping},
        trace_run=run,
        bounds={"A_minus_aB": bounds_a.as_dict(), "A_minus_bB": bounds_b.as_dict()},
        config_echo={"sampling": cfg.as_dict()},
        wall_time_ms=_elapsed_ms(t0),
        sub_reports=subs,
    )


class _ResolventBank:
    """Solves ``(A - z_j B) y = B v`` for a fixed set of poles.

    Dense LU factors are computed once per pole and shared across samples.
    Achieved GMRES residuals are tracked for the report.
    """

    def __init__(self, base, poles, solver: SolverConfig):
        self.pencil = base if isinstance(base, Pencil) else Pencil(base)
        self.ops = [ShiftedOperator(self.pencil, complex(z)) for z in poles]
        self.solver = solver
        self.handles = None
        self._lock = threading.Lock()
        self.max_residual = 0.0
        self.total_iters = 0
        self.solves = 0
        if solver.method == "dense_lu":
            self.handles = [dense_lu_factor(op) for op in self.ops]

    def solve(self, j, rhs):
        if self.handles is not None:
            y = dense_lu_solve(self.handles[j], rhs)
            with self._lock:
                self.solves += 1
            return y
        res = gmres(self.ops[j], rhs, self.solver)
        with self._lock:
            self.solves += 1
            self.total_iters += res.iters
            self.max_residual = max(self.max_residual, res.rel_residual)
        if not res.rel_residual <= SOLVER_FLOOR:
            raise SolverError(f"GMRES reached only {res.rel_residual:.3g} relative residual "
                              f"for pole {self.ops[j].z}; need at most {SOLVER_FLOOR}")
        return res.solution

    def stats(self):
        out = {"solves": self.solves}
        if self.handles is None:
            out.update(max_rel_residual=self.max_residual, total_iters=self.total_iters)
        return out


def _real_problem(base, cfg: SampleConfig) -> bool:
    P = base if isinstance(base, Pencil) else Pencil(base)
    real = P.A.scalar_kind == "real" and (P.B is None or P.B.scalar_kind == "real")
    return real and not cfg.is_complex


def _rational_setup(base, q: ContourQuadrature, solver, cfg):
    # real A, B and v: the lower poles give conjugate contributions
    pair = q.kind == "halfcircle_conjugate" and _real_problem(base, cfg)
    poles, weights = (q.upper if pair else (q.poles, q.weights))
    bank = _ResolventBank(base, poles, solver)
    return pair, poles, weights, bank


def _pole_terms(bank, weights, pair, v):
    Bv = bank.pencil.apply_B(v)
    terms = np.array([weights[j] * np.vdot(v, bank.solve(j, Bv)) for j in range(len(weights))])
    return 2.0 * terms.real if pair else terms


def _rational_method(q, solver, pair, interval=None):
    out = {"name": "rational", **q.summary(), "poles_solved": q.n_upper if pair else q.n_c,
           "conjugate_pairs": pair, "solver": solver.as_dict()}
    if interval is not None:
        out["interval"] = list(interval)
    return out


def count_rational(base, interval, m: int = 8, solver: SolverConfig = SolverConfig(),
                   cfg: SampleConfig = SampleConfig()) -> CountReport:
    """Count eigenvalues in ``[a, b]`` with a half-circle rational filter.

    Samples form the outer loop and poles the inner loop. ``m`` is the
    number of upper-half poles; ``2 m`` poles are used in total. For real
    problems with real probes only the upper poles are solved and twice
    the real part is accumulated. For a pencil the resolvent is applied
    as ``(A - z B)^{-1} (B v)``.

    Raises
    ------
    SolverError
        If an iterative solve does not reach ``SOLVER_FLOOR``.
    """
    t0 = time.perf_counter()
    a, b = _check_interval(interval)
    q = build_halfcircle_quadrature(a, b, m)
    pair, poles, weights, bank = _rational_setup(base, q, solver, cfg)
    run = rq_estimate(lambda v: np.sum(_pole_terms(bank, weights, pair, v)), base.n, cfg)
    method = _rational_method(q, solver, pair, (a, b))
    method["solver_stats"] = bank.stats()
    return CountReport(run.estimate, method, run, None,
                       {"sampling": cfg.as_dict(), "solver": solver.as_dict()},
                       _elapsed_ms(t0))


def count_rational_swapped(base, interval, m: int = 8, solver: SolverConfig = SolverConfig(),
                           cfg: SampleConfig = SampleConfig(),
                           on_partial: Optional[Callable[[dict], None]] = None) -> CountReport:
    """Rational count with the pole loop outside and the sample loop inside.

    Every pole sees the same ``cfg.n_v_max`` sample vectors, so with exact
    solves the result equals :func:`count_rational` run on the same number
    of samples. There is no early stop. One entry per solved pole is
    appended to ``partials`` (and passed to ``on_partial``) as soon as that
    pole is finished; with ``cfg.workers > 1`` poles run concurrently and
    entries are emitted in pole order.
    """
    t0 = time.perf_counter()
    a, b = _check_interval(interval)
    q = build_halfcircle_quadrature(a, b, m)
    pair, poles, weights, bank = _rational_setup(base, q, solver, cfg)
    n, nv = base.n, cfg.n_v_max
    scale = cfg.scale(n)
    vs = [sample_vector(n, cfg, k) for k in range(nv)]
    Bvs = [bank.pencil.apply_B(v) for v in vs]

    def pole_column(j):
        return np.array([np.vdot(vs[k], bank.solve(j, Bvs[k])) for k in range(nv)])

    partials = []
    columns = []
    total = 0.0

    def finish(j, col):
        nonlocal total
        terms = weights[j] * col
        terms = 2.0 * terms.real if pair else terms
        contribution = complex(scale * np.sum(terms) / nv)
        total += contribution.real
        z, w = complex(poles[j]), complex(weights[j])
        tr = complex(scale * np.mean(col))
        entry = {"pole": j, "z": [z.real, z.imag], "weight": [w.real, w.imag],
                 "resolvent_trace": [tr.real, tr.imag], "contribution": contribution.real,
                 "cumulative": total}
        partials.append(entry)
        columns.append(terms)
        if on_partial is not None:
            on_partial(entry)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            for j, col in enumerate(pool.map(pole_column, range(len(poles)))):
                finish(j, col)
    else:
        for j in range(len(poles)):
            finish(j, pole_column(j))
    per_sample = np.sum(columns, axis=0) if columns else np.zeros(nv)
    # sum over poles in the same order as the unswapped loop
    quotients = scale * np.real(per_sample)
    imag = scale * np.imag(per_sample)
    run = TraceRun.from_quotients(quotients, cfg, imag)
    method = _rational_method(q, solver, pair, (a, b))
    method["loop_order"] = "poles_outer"
    method["solver_stats"] = bank.stats()
    return CountReport(run.estimate, method, run, None,
                       {"sampling": cfg.as_dict(), "solver": solver.as_dict()},
                       _elapsed_ms(t0), partials=partials)


def count_rational_nonsymmetric(A: SparseMatrix, center, radius: float, m: int = 16,
                                solver: SolverConfig = SolverConfig(),
                                cfg: SampleConfig = SampleConfig(kind="complex_rademacher")
                                ) -> CountReport:
    """Count eigenvalues of a general matrix inside the disk ``|z - center| <= radius``.

    ``m`` is the total number of poles on the full circle. Quotients are
    ``v^H (sum_j w_j (A - z_j)^{-1}) v``; the estimate is the real part and
    the imaginary parts are kept in ``trace_run.imag``. Complex Rademacher
    probes are averaged; normalized probes are scaled by ``n``.

    Raises
    ------
    SolverError
        If a pole hits an eigenvalue (singular shift) or a solve fails.
    """
    t0 = time.perf_counter()
    q = build_fullcircle_quadrature(complex(center), float(radius), m)
    bank = _ResolventBank(A, q.poles, solver)
    weights = q.weights
    run = rq_estimate(lambda v: np.sum(_pole_terms(bank, weights, False, v)), A.n, cfg)
    method = _rational_method(q, solver, False)
    method["disk"] = {"center": [complex(center).real, complex(center).imag],
                      "radius": float(radius)}
    method["mean_imag"] = float(np.mean(run.imag)) if run.n_v else 0.0
    method["solver_stats"] = bank.stats()
    return CountReport(run.estimate, method, run, None,
                       {"sampling": cfg.as_dict(), "solver": solver.as_dict()},
                       _elapsed_ms(t0))


class M0Suggestion(NamedTuple):
    m0: int
    enlarged_interval: tuple
    enlarged: CountReport
    inner: CountReport


def suggest_subspace_size(base, interval, method: str = "poly", *, p: int = 100,
                          damping: str = "none", m: int = 8,
                          solver: SolverConfig = SolverConfig(),
                          cfg: SampleConfig = SampleConfig(),
                          bounds: Optional[SpectralBounds] = None) -> M0Suggestion:
    """Subspace size for a contour eigensolver on ``[a, b]``.

    Counts over ``[a - alpha, b + alpha]`` with ``alpha = (b - a) / 4``,
    clipped to the spectral bounds, and returns the larger of that rounded
    count and the rounded count over ``[a, b]`` (same seed, so the same
    probes). Bounds are computed for standard problems when not given;
    pencils are clipped only when ``bounds`` is passed.
    """
    a, b = _check_interval(interval)
    alpha = 0.25 * (b - a)
    lo, hi = a - alpha, b + alpha
    pencil = base if isinstance(base, Pencil) else Pencil(base)
    if bounds is None and pencil.is_standard:
        bounds = lanczos_bounds(pencil.A, seed=cfg.seed)
    if bounds is not None:
        lo, hi = max(lo, bounds.lmin), min(hi, bounds.lmax)

    def run(iv):
        if method == "poly":
            if pencil.is_standard:
                return count_poly_standard(pencil.A, iv, p, damping, cfg, bounds)
            return count_poly_generalized(pencil, iv, p, damping, cfg)
        if method == "rational":
            return count_rational(base, iv, m, solver, cfg)
        raise ValueError(f"unknown method {method!r}; expected 'poly' or 'rational'")

    inner = run((a, b))
    enlarged = run((lo, hi))
    return M0Suggestion(max(enlarged.rounded, inner.rounded), (lo, hi), enlarged, inner)

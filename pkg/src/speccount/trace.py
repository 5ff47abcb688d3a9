"""Stochastic trace estimation with deterministic per-sample vectors."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "SampleConfig",
    "TraceRun",
    "NonFiniteQuotient",
    "sample_vector",
    "rq_estimate",
    "hutchinson_min_samples",
    "convergence_monitor",
    "oscillation_band",
]

log = logging.getLogger(__name__)

SAMPLE_KINDS = ("rademacher", "gaussian_normalized", "complex_rademacher",
                "complex_gaussian_normalized")


class NonFiniteQuotient(ArithmeticError):
    """A sample produced ``nan`` or ``inf``; usually a diverged inner solve."""


@dataclass(frozen=True)
class SampleConfig:
    """Sampling and stopping parameters.

    ``kind`` selects the probe distribution. Unit-norm kinds are scaled by
    ``n`` (the Rayleigh quotient estimator), Rademacher kinds by 1. The
    complex Rademacher entries are ``(+-1 +- i) / sqrt(2)`` so every entry
    has unit modulus. With ``early_stop=False`` exactly ``n_v_max`` samples
    are drawn and the monitor result is only reported.
    """

    kind: str = "gaussian_normalized"
    n_v_max: int = 100
    seed: int = 0
    window: int = 10
    increment_tol: float = 1.0
    early_stop: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.kind not in SAMPLE_KINDS:
            raise ValueError(f"unknown sample kind {self.kind!r}; expected one of {SAMPLE_KINDS}")
        if self.n_v_max < 1:
            raise ValueError("n_v_max must be at least 1")
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if not self.increment_tol > 0:
            raise ValueError("increment_tol must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def normalized(self) -> bool:
        return self.kind.endswith("normalized")

    @property
    def is_complex(self) -> bool:
        return self.kind.startswith("complex")

    def scale(self, n) -> float:
        return float(n) if self.normalized else 1.0

    def as_dict(self):
        return {"kind": self.kind, "n_v_max": self.n_v_max, "seed": self.seed,
                "window": self.window, "increment_tol": self.increment_tol,
                "early_stop": self.early_stop}


@dataclass
class TraceRun:
    """Per-sample quotients and their running mean."""

    quotients: np.ndarray
    running_mean: np.ndarray
    converged_at: Optional[int] = None
    imag: np.ndarray = field(default_factory=lambda: np.zeros(0))
    aux: list = field(default_factory=list)

    @classmethod
    def from_quotients(cls, quotients, cfg: Optional[SampleConfig] = None, imag=None, aux=None):
        q = np.asarray(quotients, dtype=float)
        rm = np.cumsum(q) / np.arange(1, len(q) + 1)
        run = cls(q, rm, None, np.zeros(len(q)) if imag is None else np.asarray(imag, float),
                  [] if aux is None else list(aux))
        if cfg is not None:
            run.converged_at = convergence_monitor(run, cfg)
        return run

    @property
    def n_v(self) -> int:
        return len(self.quotients)

    @property
    def estimate(self) -> float:
        return float(self.running_mean[-1]) if len(self.running_mean) else float("nan")

    @property
    def std_error(self) -> float:
        if self.n_v < 2:
            return float("inf")
        return float(np.std(self.quotients, ddof=1) / math.sqrt(self.n_v))

    def band(self, window=10):
        return oscillation_band(self.running_mean, window)


def _rng(seed, k):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(k)]))


def sample_vector(n, cfg: SampleConfig, k) -> np.ndarray:
    """Sample ``k`` of the stream defined by ``cfg``.

    The generator is keyed by ``(seed, k)``, so sample ``k`` is the same
    whether or not the earlier samples were drawn.
    """
    rng = _rng(cfg.seed, k)
    if cfg.kind == "rademacher":
        return rng.choice(np.array([-1.0, 1.0]), size=n)
    if cfg.kind == "gaussian_normalized":
        v = rng.standard_normal(n)
        return v / np.linalg.norm(v)
    if cfg.kind == "complex_rademacher":
        signs = rng.choice(np.array([-1.0, 1.0]), size=(2, n))
        return (signs[0] + 1j * signs[1]) / math.sqrt(2.0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def oscillation_band(running_mean, window=10) -> np.ndarray:
    """Spread ``max - min`` of the running mean over the trailing ``window`` samples.

    Entry ``k - 1`` belongs to sample count ``k``; counts below ``window``
    get ``inf``.
    """
    rm = np.asarray(running_mean, dtype=float)
    out = np.full(len(rm), np.inf)
    if len(rm) >= window:
        view = np.lib.stride_tricks.sliding_window_view(rm, window)
        out[window - 1:] = view.max(axis=1) - view.min(axis=1)
    return out


def _converged(rm, k, window, tol):
    # rm holds the running means of samples 1..k
    last = rm[k - window:k]
    incr = np.abs(np.diff(last))
    return incr.max() < tol / window and last.max() - last.min() < tol


def convergence_monitor(run: TraceRun, cfg: SampleConfig):
    """First sample count ``k >= window`` at which the running mean has settled.

    Over the trailing ``window`` running means, every step must change the
    mean by less than ``increment_tol / window`` and the total spread must
    stay below ``increment_tol``. Returns ``None`` if that never happens.
    """
    rm = run.running_mean
    for k in range(cfg.window, len(rm) + 1):
        if _converged(rm, k, cfg.window, cfg.increment_tol):
            return k
    return None


def rq_estimate(qform: Callable, n: int, cfg: SampleConfig) -> TraceRun:
    """Estimate ``tr(M)`` from quadratic forms ``qform(v) = v^H M v``.

    Each quotient is ``scale * Re(qform(v_k))`` with ``scale = n`` for
    unit-norm probes and 1 for Rademacher probes; imaginary parts are kept
    in ``TraceRun.imag``. Sampling stops at ``n_v_max`` or, with
    ``early_stop``, as soon as :func:`convergence_monitor` is satisfied.
    With ``workers > 1`` quotients are computed in parallel batches; the
    result does not depend on the number of workers.

    ``qform`` may also return a pair ``(value, extra)``; the extras are
    kept in sample order in ``TraceRun.aux``.
    """
    scale = cfg.scale(n)
    quotients, imag, means, aux = [], [], [], []
    total = 0.0
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    def one(k):
        return qform(sample_vector(n, cfg, k))

    try:
        k = 0
        while k < cfg.n_v_max:
            batch = range(k, min(k + cfg.workers, cfg.n_v_max))
            values = list(pool.map(one, batch)) if pool else [one(j) for j in batch]
            stop = False
            for j, val in zip(batch, values):
                if isinstance(val, tuple):
                    val, extra = val
                    aux.append(extra)
                val = complex(val)
                if not (math.isfinite(val.real) and math.isfinite(val.imag)):
                    raise NonFiniteQuotient(f"sample {j} gave a non-finite quadratic form {val}")
                quotients.append(scale * val.real)
                imag.append(scale * val.imag)
                total += quotients[-1]
                means.append(total / len(quotients))
                if (cfg.early_stop and len(means) >= cfg.window
                        and _converged(np.asarray(means[-cfg.window:]), cfg.window,
                                       cfg.window, cfg.increment_tol)):
                    stop = True
                    break
            k = len(quotients)
            if stop:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if imag and max(abs(x) for x in imag) > 0:
        log.debug("largest imaginary part of a quotient: %g", max(abs(x) for x in imag))
    return TraceRun.from_quotients(quotients, cfg, imag, aux)


def hutchinson_min_samples(trace_estimate, delta) -> int:
    """Samples that make ``round(T) == tr(P)`` with probability ``1 - delta``.

    ``ceil(16 tr(P) ln(2 / delta))`` for a projector ``P``.
    """
    if not trace_estimate > 0:
        raise ValueError("trace estimate must be positive")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    x = 16.0 * trace_estimate * math.log(2.0 / delta)
    # absorb rounding noise such as ln(e) = 1.0000000000000002
    return int(math.ceil(x * (1.0 - 1e-12)))

"""Command-line front end: ``speccount <command> [flags]``.

JSON reports go to stdout or ``--out``; plot data goes to CSV. Usage
errors exit with status 2, runtime failures with status 1 and an error
document on stdout.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .bounds import SpectralBounds, lanczos_bounds
from .chebyshev import DAMPINGS, ChebFilter, filter_eval, make_filter
from .count import (SCHEMA_VERSION, count_poly_generalized, count_poly_standard, count_rational,
                    count_rational_nonsymmetric, count_rational_swapped, suggest_subspace_size)
from .mmio import load_matrix_market, write_matrix_market
from .oracle import cached_dense_spectrum, dense_spectrum, exact_count, exact_filter_trace
from .rational import build_halfcircle_quadrature, rational_eval
from .solvers import SolverConfig
from .sparse import ClusterSpec, Pencil, gen_diag_spectrum, gen_laplacian
from .trace import SAMPLE_KINDS, SampleConfig

DATA_ENV = "SPECCOUNT_DATA_DIR"


class UsageError(Exception):
    """Flag combination that argparse cannot catch on its own."""


def _int_in(lo, hi=None):
    def conv(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if value < lo or (hi is not None and value > hi):
            bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{value} is outside {bound}")
        return value
    return conv


def _open_unit(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"{value} is outside (0, 1)")
    return value


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return value


def _cluster(text):
    try:
        center, width, count = text.split(",")
        return float(center), float(width), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected CENTER,WIDTH,COUNT, got {text!r}")


def resolve_path(path):
    """Return ``path`` if it exists, else look it up in ``$SPECCOUNT_DATA_DIR``."""
    if os.path.exists(path):
        return path
    root = os.environ.get(DATA_ENV)
    if root:
        alt = os.path.join(root, path)
        if os.path.exists(alt):
            return alt
    raise FileNotFoundError(f"matrix file not found: {path}"
                            + ("" if root else f" (set {DATA_ENV} to search a data directory)"))


def _load(path):
    return load_matrix_market(resolve_path(path))


def _pencil(args):
    A = _load(args.matrix)
    B = _load(args.bmatrix) if getattr(args, "bmatrix", None) else None
    return Pencil(A, B)


# ---- parser -----------------------------------------------------------------

def _add_output(p):
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write per-sample or grid data as CSV")


def _add_sampling(p, default_kind="gaussian_normalized"):
    g = p.add_argument_group("sampling")
    g.add_argument("--nv", type=_int_in(1), default=100, help="maximum number of samples")
    g.add_argument("--sample-kind", choices=SAMPLE_KINDS, default=default_kind)
    g.add_argument("--seed", type=_int_in(0), default=0, help="sampling seed (default 0)")
    g.add_argument("--window", type=_int_in(2), default=10,
                   help="running-mean window for the stopping test")
    g.add_argument("--increment-tol", type=_positive, default=1.0,
                   help="allowed running-mean spread over the window")
    g.add_argument("--no-early-stop", action="store_true",
                   help="always draw --nv samples")
    g.add_argument("--threads", type=_int_in(1), default=1, help="worker threads")


def _add_solver(p):
    g = p.add_argument_group("linear solver")
    g.add_argument("--solver", choices=("dense_lu", "gmres"), default="dense_lu")
    g.add_argument("--tol", type=_open_unit, default=1e-2,
                   help="GMRES relative residual reduction")
    g.add_argument("--restart", type=_int_in(1), default=20, help="GMRES restart length")
    g.add_argument("--maxit", type=_int_in(1), default=200, help="GMRES total iterations")


def _add_poly(p):
    g = p.add_argument_group("polynomial filter")
    g.add_argument("--degree", type=_int_in(0, 100000), default=100)
    g.add_argument("--damping", choices=DAMPINGS, default="none")


def _add_interval(p, required=True):
    p.add_argument("--a", type=float, required=required, help="left endpoint")
    p.add_argument("--b", type=float, required=required, help="right endpoint")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speccount",
        description="Estimate eigenvalue counts of sparse matrices and pencils.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("bounds", help="Lanczos enclosure of the spectrum")
    p.add_argument("--matrix", required=True)
    p.add_argument("--steps", type=_int_in(1), default=None)
    p.add_argument("--margin", type=float, default=0.005)
    p.add_argument("--seed", type=_int_in(0), default=0)
    _add_output(p)

    for name, helptext in (("count", "count eigenvalues in [a, b]"),
                           ("trace-run", "count and stream the running mean as CSV")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--matrix", required=True)
        p.add_argument("--bmatrix", help="B of a pencil (A, B); identity if omitted")
        _add_interval(p)
        p.add_argument("--method", choices=("poly", "rational"), default="poly")
        p.add_argument("--nc", type=_int_in(1, 64), default=8,
                       help="Gauss points on the upper half circle; total poles = 2 * nc")
        p.add_argument("--swapped", action="store_true",
                       help="rational only: pole loop outside the sample loop")
        _add_poly(p)
        _add_solver(p)
        _add_sampling(p)
        _add_output(p)

    p = sub.add_parser("count-gen", help="count for a pencil (A, B) as mu_a - mu_b")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bmatrix", required=True)
    _add_interval(p)
    p.add_argument("--method", choices=("poly", "rational"), default="poly")
    p.add_argument("--nc", type=_int_in(1, 64), default=8,
                   help="Gauss points on the upper half circle; total poles = 2 * nc")
    _add_poly(p)
    _add_solver(p)
    _add_sampling(p)
    _add_output(p)

    p = sub.add_parser("count-nonsym", help="count eigenvalues of a general matrix in a disk")
    p.add_argument("--matrix", required=True)
    p.add_argument("--center-re", type=float, default=0.0)
    p.add_argument("--center-im", type=float, default=0.0)
    p.add_argument("--radius", type=_positive, required=True)
    p.add_argument("--nc", type=_int_in(2, 128), default=16,
                   help="total poles on the full circle (even)")
    _add_solver(p)
    _add_sampling(p, default_kind="complex_rademacher")
    _add_output(p)

    p = sub.add_parser("suggest-m0", help="subspace size from the count over [a-alpha, b+alpha]")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bmatrix")
    _add_interval(p)
    p.add_argument("--method", choices=("poly", "rational"), default="poly")
    p.add_argument("--nc", type=_int_in(1, 64), default=8,
                   help="Gauss points on the upper half circle; total poles = 2 * nc")
    _add_poly(p)
    _add_solver(p)
    _add_sampling(p)
    _add_output(p)

    p = sub.add_parser("filter-eval", help="tabulate a Chebyshev filter on [-1, 1]")
    _add_interval(p)
    _add_poly(p)
    p.add_argument("--grid", type=_int_in(2), default=1001)
    _add_output(p)

    p = sub.add_parser("rational-eval", help="tabulate the half-circle rational filter")
    _add_interval(p)
    p.add_argument("--nc", type=_int_in(1, 64), default=8,
                   help="Gauss points on the upper half circle; total poles = 2 * nc")
    p.add_argument("--lo", type=float, help="left end of the grid (default a - (b-a))")
    p.add_argument("--hi", type=float, help="right end of the grid (default b + (b-a))")
    p.add_argument("--grid", type=_int_in(2), default=1001)
    _add_output(p)

    p = sub.add_parser("oracle-count", help="exact count by dense eigendecomposition")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bmatrix")
    _add_interval(p, required=False)
    p.add_argument("--center-re", type=float)
    p.add_argument("--center-im", type=float, default=0.0)
    p.add_argument("--radius", type=_positive)
    p.add_argument("--degree", type=_int_in(0, 100000),
                   help="also report the exact trace of this Chebyshev filter")
    p.add_argument("--damping", choices=DAMPINGS, default="none")
    p.add_argument("--nc", type=_int_in(1, 64),
                   help="also report the exact trace of this rational filter")
    p.add_argument("--cache-dir", help="cache spectra here, keyed by matrix content")
    _add_output(p)

    p = sub.add_parser("gen-matrix", help="write a test matrix in Matrix Market format")
    p.add_argument("--kind", choices=("laplacian", "diag"), required=True)
    p.add_argument("--nx", type=_int_in(1), default=10)
    p.add_argument("--ny", type=_int_in(1), default=1)
    p.add_argument("--nz", type=_int_in(1), default=1)
    p.add_argument("--n", type=_int_in(1), default=100)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--cluster", type=_cluster, action="append", default=[],
                   help="CENTER,WIDTH,COUNT; repeatable")
    p.add_argument("--d-lambda", type=_positive, help="largest relative gap allowed inside a cluster")
    p.add_argument("--seed", type=_int_in(0), default=0)
    p.add_argument("--output", required=True, help="destination .mtx path")
    _add_output(p)
    return parser


# ---- commands ---------------------------------------------------------------

def _sample_cfg(args):
    return SampleConfig(kind=args.sample_kind, n_v_max=args.nv, seed=args.seed,
                        window=args.window, increment_tol=args.increment_tol,
                        early_stop=not args.no_early_stop, workers=args.threads)


def _solver_cfg(args):
    return SolverConfig(method=args.solver, rel_residual_tol=args.tol,
                        restart=args.restart, max_iters=args.maxit)


def _interval(args):
    if not args.a < args.b:
        raise UsageError(f"need --a < --b, got {args.a} and {args.b}")
    return args.a, args.b


def _write_csv(path, header, rows):
    handle = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        w = csv.writer(handle)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if handle is not sys.stdout:
            handle.close()


def _run_csv(path, run):
    band = run.band()
    _write_csv(path, ["k", "quotient", "running_mean", "band"],
               [(k + 1, repr(float(q)), repr(float(m)), repr(float(bd)))
                for k, (q, m, bd) in enumerate(zip(run.quotients, run.running_mean, band))])


def _pole_counts(report):
    # both readings of the pole count, to avoid ambiguity
    meth = report.method
    if meth.get("name") == "rational":
        meth["poles_upper_half"] = meth.pop("n_upper")
        meth["poles_total"] = meth.pop("n_c")
    return report


def cmd_bounds(args):
    A = _load(args.matrix)
    bnd = lanczos_bounds(A, steps=args.steps, seed=args.seed, margin=args.margin)
    return {"schema": SCHEMA_VERSION, "command": "bounds", "n": A.n, **bnd.as_dict()}


def _count_standard(args, P):
    a, b = _interval(args)
    cfg = _sample_cfg(args)
    if args.method == "poly":
        if args.swapped:
            raise UsageError("--swapped applies to --method rational only")
        if P.is_standard:
            return count_poly_standard(P.A, (a, b), args.degree, args.damping, cfg)
        return count_poly_generalized(P, (a, b), args.degree, args.damping, cfg)
    base = P.A if P.is_standard else P
    if args.swapped:
        return count_rational_swapped(base, (a, b), args.nc, _solver_cfg(args), cfg)
    return count_rational(base, (a, b), args.nc, _solver_cfg(args), cfg)


def cmd_count(args):
    if args.command == "trace-run" and not args.csv:
        raise UsageError("trace-run needs --csv (use - for stdout together with --out)")
    report = _pole_counts(_count_standard(args, _pencil(args)))
    if args.csv:
        _run_csv(args.csv, report.trace_run)
    return report


def cmd_count_gen(args):
    return cmd_count(argparse.Namespace(**vars(args), swapped=False))


def cmd_count_nonsym(args):
    if args.nc % 2:
        raise UsageError("--nc must be even for the full circle")
    A = _load(args.matrix)
    report = count_rational_nonsymmetric(A, complex(args.center_re, args.center_im),
                                         args.radius, args.nc, _solver_cfg(args),
                                         _sample_cfg(args))
    report = _pole_counts(report)
    if args.csv:
        _run_csv(args.csv, report.trace_run)
    return report


def cmd_suggest_m0(args):
    P = _pencil(args)
    base = P.A if P.is_standard else P
    res = suggest_subspace_size(base, _interval(args), args.method, p=args.degree,
                                damping=args.damping, m=args.nc, solver=_solver_cfg(args),
                                cfg=_sample_cfg(args))
    return {"schema": SCHEMA_VERSION, "command": "suggest-m0", "m0": res.m0,
            "enlarged_interval": list(res.enlarged_interval),
            "enlarged": _pole_counts(res.enlarged).to_dict(),
            "inner": _pole_counts(res.inner).to_dict()}


def cmd_filter_eval(args):
    a, b = _interval(args)
    if not (-1 <= a <= 1 and -1 <= b <= 1):
        raise UsageError("filter-eval endpoints are mapped coordinates in [-1, 1]")
    f = ChebFilter.build(a, b, args.degree, args.damping)
    t = np.linspace(-1.0, 1.0, args.grid)
    vals = filter_eval(f, t)
    target = f.target(t)
    _write_csv(args.csv or "-", ["t", "value", "target"],
               [(repr(float(x)), repr(float(y)), repr(float(z)))
                for x, y, z in zip(t, vals, target)])
    return {"schema": SCHEMA_VERSION, "command": "filter-eval", **f.summary(),
            "grid": args.grid} if args.csv else None


def cmd_rational_eval(args):
    a, b = _interval(args)
    q = build_halfcircle_quadrature(a, b, args.nc)
    lo = a - (b - a) if args.lo is None else args.lo
    hi = b + (b - a) if args.hi is None else args.hi
    lam = np.linspace(lo, hi, args.grid)
    chi = rational_eval(q, lam)
    _write_csv(args.csv or "-", ["lambda", "chi_real", "chi_imag"],
               [(repr(float(x)), repr(float(c.real)), repr(float(c.imag)))
                for x, c in zip(lam, chi)])
    summary = q.summary()
    summary["poles_upper_half"] = summary.pop("n_upper")
    summary["poles_total"] = summary.pop("n_c")
    return {"schema": SCHEMA_VERSION, "command": "rational-eval", **summary,
            "poles": q.pole_table()} if args.csv else None


def cmd_oracle_count(args):
    P = _pencil(args)
    spec = cached_dense_spectrum(P, args.cache_dir) if args.cache_dir else dense_spectrum(P)
    out = {"schema": SCHEMA_VERSION, "command": "oracle-count", "n": spec.n}
    if args.radius is not None:
        if args.center_re is None:
            raise UsageError("--radius needs --center-re")
        out["disk"] = {"center": [args.center_re, args.center_im], "radius": args.radius}
        out["count"] = exact_count(spec, disk=(complex(args.center_re, args.center_im),
                                               args.radius))
        return out
    if args.a is None or args.b is None:
        raise UsageError("give --a and --b, or --center-re and --radius")
    a, b = _interval(args)
    out["interval"] = [a, b]
    out["count"] = exact_count(spec, interval=(a, b))
    if args.degree is not None:
        lam = np.real(spec.eigenvalues)
        bnd = SpectralBounds.exact(lam.min(), lam.max())
        f = make_filter("mid", a, b, bnd, args.degree, args.damping)
        out["filter_trace"] = exact_filter_trace(spec, f)
        out["filter"] = f.summary()
    if args.nc is not None:
        out["rational_trace"] = exact_filter_trace(spec, build_halfcircle_quadrature(a, b, args.nc))
    return out


def cmd_gen_matrix(args):
    if args.kind == "laplacian":
        A = gen_laplacian(args.nx, args.ny, args.nz)
        comment = f"laplacian {args.nx}x{args.ny}x{args.nz}"
    else:
        if not args.lo < args.hi:
            raise UsageError("need --lo < --hi")
        spec = ClusterSpec(args.n, (args.lo, args.hi), tuple(args.cluster), args.d_lambda)
        A = gen_diag_spectrum(spec, seed=args.seed)
        comment = f"diagonal n={args.n} on [{args.lo}, {args.hi}] seed={args.seed}"
    write_matrix_market(args.output, A, comment)
    return {"schema": SCHEMA_VERSION, "command": "gen-matrix", "output": args.output,
            "n": A.n, "nnz": A.nnz, "symmetry": A.symmetry}


COMMANDS = {
    "bounds": cmd_bounds,
    "count": cmd_count,
    "trace-run": cmd_count,
    "count-gen": cmd_count_gen,
    "count-nonsym": cmd_count_nonsym,
    "suggest-m0": cmd_suggest_m0,
    "filter-eval": cmd_filter_eval,
    "rational-eval": cmd_rational_eval,
    "oracle-count": cmd_oracle_count,
    "gen-matrix": cmd_gen_matrix,
}


def _emit(doc, path):
    text = json.dumps(doc, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dispatch(args) -> int:
    """Run a parsed command; returns the process exit status."""
    try:
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"speccount {args.command}: error: {exc}\n")
        return 2
    except Exception as exc:  # reported as a structured document
        _emit({"schema": SCHEMA_VERSION, "command": args.command,
               "error": {"type": type(exc).__name__, "message": str(exc)}}, None)
        return 1
    if result is None:
        return 0
    if hasattr(result, "to_dict"):
        result = {"command": args.command, **result.to_dict()}
    _emit(result, args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(message)s")
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())

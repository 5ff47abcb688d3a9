"""Matrix Market reader and writer.

Only the subset needed for eigenvalue counting is supported: ``matrix``
objects in ``coordinate`` or ``array`` layout with ``real`` or ``complex``
fields and ``general``/``symmetric``/``hermitian`` symmetry. Symmetric and
Hermitian files are expanded to full storage on load.
"""
from __future__ import annotations

import gzip
import os

import numpy as np
import scipy.sparse as sp

from .sparse import SparseMatrix

__all__ = ["MatrixMarketError", "load_matrix_market", "write_matrix_market"]

_FORMATS = ("coordinate", "array")
_FIELDS = ("real", "complex")
_SYMMETRIES = ("general", "symmetric", "hermitian")


class MatrixMarketError(ValueError):
    """Malformed or unsupported Matrix Market input."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
        if lineno is not None:
            where = f"{where}:{lineno}" if where else f"line {lineno}"
        super().__init__(f"{where}: {message}" if where else message)


def _open(path):
    path = os.fspath(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rt")
    return open(path, "r")


def _parse_header(line, path):
    tokens = line.strip().split()
    if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
        raise MatrixMarketError("missing '%%MatrixMarket' banner", 1, path)
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise MatrixMarketError(f"unsupported object {obj!r}", 1, path)
    if fmt not in _FORMATS:
        raise MatrixMarketError(f"unsupported format {fmt!r}", 1, path)
    if fld in ("pattern", "integer"):
        raise MatrixMarketError(
            f"field {fld!r} is not supported; only real and complex matrices can be counted",
            1, path)
    if fld not in _FIELDS:
        raise MatrixMarketError(f"unknown field {fld!r}", 1, path)
    if sym not in _SYMMETRIES:
        raise MatrixMarketError(f"unsupported symmetry {sym!r}", 1, path)
    return fmt, fld, sym


def _numbers(tokens, count, kind, lineno, path):
    if len(tokens) != count:
        raise MatrixMarketError(f"expected {count} fields, found {len(tokens)}", lineno, path)
    try:
        return [kind(t) for t in tokens]
    except ValueError:
        raise MatrixMarketError(f"cannot parse {' '.join(tokens)!r}", lineno, path) from None


def load_matrix_market(path) -> SparseMatrix:
    """Read a Matrix Market file into a :class:`SparseMatrix`.

    Raises
    ------
    MatrixMarketError
        On malformed content (with the offending line number) or on the
        unsupported ``pattern`` and ``integer`` fields.
    """
    with _open(path) as fh:
        lines = iter(enumerate(fh, start=1))
        try:
            _, banner = next(lines)
        except StopIteration:
            raise MatrixMarketError("empty file", None, path) from None
        fmt, fld, sym = _parse_header(banner, path)
        lineno, size_line = None, None
        for lineno, line in lines:
            s = line.strip()
            if s and not s.startswith("%"):
                size_line = s
                break
        if size_line is None:
            raise MatrixMarketError("missing size line", lineno, path)
        ncols_size = 3 if fmt == "coordinate" else 2
        dims = _numbers(size_line.split(), ncols_size, int, lineno, path)
        nrows, ncols = dims[0], dims[1]
        if nrows != ncols:
            raise MatrixMarketError(f"matrix must be square, got {nrows}x{ncols}", lineno, path)
        if nrows < 0:
            raise MatrixMarketError("negative dimension", lineno, path)
        n = nrows
        width = 1 if fld == "real" else 2
        if fmt == "coordinate":
            A = _read_coordinate(lines, n, dims[2], width, sym, path)
        else:
            A = _read_array(lines, n, width, sym, path)
    return SparseMatrix(A, sym)


def _read_coordinate(lines, n, nnz, width, sym, path):
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128 if width == 2 else np.float64)
    k = 0
    for lineno, line in lines:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        if k >= nnz:
            raise MatrixMarketError(f"more than the declared {nnz} entries", lineno, path)
        tokens = s.split()
        if len(tokens) != 2 + width:
            raise MatrixMarketError(f"expected {2 + width} fields, found {len(tokens)}", lineno, path)
        i, j = _numbers(tokens[:2], 2, int, lineno, path)
        x = _numbers(tokens[2:], width, float, lineno, path)
        if not (1 <= i <= n and 1 <= j <= n):
            raise MatrixMarketError(f"index ({i}, {j}) outside 1..{n}", lineno, path)
        val = x[0] if width == 1 else complex(x[0], x[1])
        if sym != "general" and j > i:
            # some writers store the upper triangle; fold it onto the lower one
            i, j = j, i
            if sym == "hermitian":
                val = np.conj(val)
        rows[k], cols[k] = i - 1, j - 1
        vals[k] = val
        k += 1
    if k != nnz:
        raise MatrixMarketError(f"declared {nnz} entries but found {k}", None, path)
    return _expand(rows, cols, vals, n, sym)


def _read_array(lines, n, width, sym, path):
    if sym == "general":
        positions = [(i, j) for j in range(n) for i in range(n)]
    else:
        positions = [(i, j) for j in range(n) for i in range(j, n)]
    vals = np.empty(len(positions), dtype=np.complex128 if width == 2 else np.float64)
    k = 0
    for lineno, line in lines:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        if k >= len(positions):
            raise MatrixMarketError("more values than the declared size", lineno, path)
        x = _numbers(s.split(), width, float, lineno, path)
        vals[k] = x[0] if width == 1 else complex(x[0], x[1])
        k += 1
    if k != len(positions):
        raise MatrixMarketError(f"expected {len(positions)} values but found {k}", None, path)
    idx = np.array(positions, dtype=np.int64).reshape(-1, 2)
    keep = vals != 0
    return _expand(idx[keep, 0], idx[keep, 1], vals[keep], n, sym)


def _expand(rows, cols, vals, n, sym):
    if sym != "general":
        off = rows != cols
        mirrored = np.conj(vals[off]) if sym == "hermitian" else vals[off]
        rows, cols, vals = (np.concatenate([rows, cols[off]]),
                            np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, mirrored]))
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _fmt(x):
    return repr(float(x))


def write_matrix_market(path, A: SparseMatrix, comment: str = "") -> None:
    """Write ``A`` in coordinate format.

    Symmetric and Hermitian matrices are written as their lower triangle
    with the matching header. Values are printed with ``repr`` so a round
    trip through :func:`load_matrix_market` is bit-exact.
    """
    coo = A.csr.tocoo()
    rows, cols, vals = coo.row, coo.col, coo.data
    sym = A.symmetry
    if sym != "general":
        keep = rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    fld = "complex" if A.scalar_kind == "complex" else "real"
    order = np.lexsort((rows, cols))
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {fld} {sym}\n")
        for line in comment.splitlines():
            fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {len(vals)}\n")
        for k in order:
            v = vals[k]
            if fld == "complex":
                fh.write(f"{rows[k] + 1} {cols[k] + 1} {_fmt(v.real)} {_fmt(v.imag)}\n")
            else:
                fh.write(f"{rows[k] + 1} {cols[k] + 1} {_fmt(v)}\n")

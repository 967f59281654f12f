"""Matrix Market I/O for real symmetric coordinate matrices."""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .linalg import SparseSymMatrix

HEADER = "%%MatrixMarket matrix coordinate real symmetric"


class MatrixMarketError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


def write_matrix_market(M: SparseSymMatrix, path) -> None:
    """Write the lower triangle with 1-based indices and 17 significant digits."""
    low = sp.tril(M.csr, format="coo")
    order = np.lexsort((low.row, low.col))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(HEADER + "\n")
        fh.write(f"{M.n} {M.n} {low.nnz}\n")
        for r, c, v in zip(low.row[order], low.col[order], low.data[order]):
            fh.write(f"{r + 1} {c + 1} {v:.17g}\n")


def read_matrix_market(path, label: str = "M") -> SparseSymMatrix:
    """Read a coordinate/real/symmetric file, expanding to the full pattern."""
    path = os.fspath(path)
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0].lower() != "%%matrixmarket":
        raise MatrixMarketError(path, 1, "malformed header")
    obj, fmt, field, sym = (h.lower() for h in head[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketError(path, 1, f"unsupported format {obj} {fmt}")
    if field not in ("real", "integer", "double"):
        raise MatrixMarketError(path, 1, f"unsupported field {field}")
    if sym != "symmetric":
        raise MatrixMarketError(path, 1, f"expected a symmetric matrix, got {sym}")

    lineno = 1
    body = iter(enumerate(lines[1:], start=2))
    size = None
    for lineno, line in body:
        s = line.strip()
        if s and not s.startswith("%"):
            size = s.split()
            break
    if size is None:
        raise MatrixMarketError(path, lineno, "missing size line")
    try:
        nrows, ncols, nnz = (int(t) for t in size)
    except ValueError:
        raise MatrixMarketError(path, lineno, f"bad size line {line!r}") from None
    if nrows != ncols:
        raise MatrixMarketError(path, lineno, f"symmetric matrix must be square, got {nrows}x{ncols}")

    rows, cols, vals = [], [], []
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) != 3:
            raise MatrixMarketError(path, lineno, f"expected 'row col value', got {line!r}")
        try:
            r, c, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise MatrixMarketError(path, lineno, f"unparsable entry {line!r}") from None
        if not (1 <= r <= nrows and 1 <= c <= ncols):
            raise MatrixMarketError(path, lineno, f"index ({r}, {c}) out of range for {nrows}x{ncols}")
        if c > r:
            raise MatrixMarketError(path, lineno, f"entry ({r}, {c}) above the diagonal in symmetric storage")
        rows.append(r - 1)
        cols.append(c - 1)
        vals.append(v)
    if len(vals) != nnz:
        raise MatrixMarketError(path, lineno, f"expected {nnz} entries, found {len(vals)}")

    rows = np.array(rows, dtype=np.int64)
    cols = np.array(cols, dtype=np.int64)
    vals = np.array(vals)
    off = rows != cols
    full = sp.coo_matrix(
        (np.concatenate([vals, vals[off]]), (np.concatenate([rows, cols[off]]), np.concatenate([cols, rows[off]]))),
        shape=(nrows, ncols),
    )
    return SparseSymMatrix(full, label)

"""Sparse symmetric kernels, inner products and Gram-Schmidt.

Every product with a stored matrix goes through :func:`spmv`, which is the
single place the matrix-vector product (MV) counter is incremented.
"""
from __future__ import annotations

import threading
from collections import Counter

import numpy as np
import scipy.sparse as sp

DROP_TOL = 1e-10


class MvCounter:
    """Thread-safe count of sparse matrix-vector products."""

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def increment(self, n: int = 1, label: str | None = None) -> None:
        with self._lock:
            self._count += n


class TallyCounter(MvCounter):
    """MV counter that also tallies increments per matrix label."""

    def __init__(self):
        super().__init__()
        self.by_label = Counter()

    def increment(self, n=1, label=None):
        with self._lock:
            self._count += n
            self.by_label[label] += n


class SparseSymMatrix:
    """Symmetric matrix in CSR layout with both triangles stored.

    Parameters
    ----------
    matrix : array_like or scipy sparse matrix
        Square matrix. Values must be exactly symmetric; use
        :meth:`symmetrized` to build one from an almost-symmetric input.
    label : str
        Tag reported to the MV counter (``"A"``, ``"B"``, ...).
    """

    def __init__(self, matrix, label: str = "M"):
        csr = sp.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        n, m = csr.shape
        if n != m:
            raise ValueError(f"matrix must be square, got {csr.shape}")
        if n < 1:
            raise ValueError("matrix dimension must be >= 1")
        diff = csr - csr.T
        if diff.nnz and np.max(np.abs(diff.data)) != 0.0:
            raise ValueError("matrix values are not exactly symmetric")
        pattern = csr.copy()
        pattern.data = np.ones_like(pattern.data)
        if (pattern != pattern.T).nnz:
            raise ValueError("matrix is not structurally symmetric")
        self.csr = csr
        self.label = label

    @classmethod
    def symmetrized(cls, matrix, label="M"):
        m = sp.csr_matrix(matrix, dtype=np.float64)
        return cls((m + m.T) * 0.5, label=label)

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    @property
    def shape(self):
        return self.csr.shape

    def norm_inf(self) -> float:
        return float(abs(self.csr).sum(axis=1).max())

    def todense(self) -> np.ndarray:
        return self.csr.toarray()

    def __repr__(self):
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz}, label={self.label!r})"


def spmv(M: SparseSymMatrix, x, counter: MvCounter | None = None) -> np.ndarray:
    """Return ``M @ x``; a 2-D ``x`` counts one product per column."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != M.n:
        raise ValueError(f"dimension mismatch: matrix is {M.n}, vector is {x.shape[0]}")
    if counter is not None:
        counter.increment(1 if x.ndim == 1 else x.shape[1], M.label)
    return M.csr @ x


class SparsePencil:
    """The pair ``(A, B)`` sharing one MV counter."""

    def __init__(self, A: SparseSymMatrix, B: SparseSymMatrix, counter: MvCounter | None = None):
        if A.n != B.n:
            raise ValueError(f"A is {A.n}x{A.n} but B is {B.n}x{B.n}")
        self.A = A
        self.B = B
        self.counter = counter if counter is not None else MvCounter()
        self.a_norm_inf = A.norm_inf()

    @property
    def n(self):
        return self.A.n

    def mul_a(self, x):
        return spmv(self.A, x, self.counter)

    def mul_b(self, x):
        return spmv(self.B, x, self.counter)


class ShiftedOperator:
    """``x -> A x - theta B x`` without forming ``A - theta B``.

    Each application costs two MVs.
    """

    def __init__(self, pencil: SparsePencil, theta: float):
        self.pencil = pencil
        self.theta = float(theta)

    @property
    def n(self):
        return self.pencil.n

    def apply(self, x):
        return self.pencil.mul_a(x) - self.theta * self.pencil.mul_b(x)

    __matmul__ = apply


def b_inner(B: SparseSymMatrix, u, v, counter: MvCounter | None = None) -> float:
    """B-inner product ``v^T B u``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(v @ spmv(B, u, counter))


def b_norm(B: SparseSymMatrix, v, counter=None) -> float:
    return float(np.sqrt(b_inner(B, v, v, counter)))


def project_out(z, basis, weighted_basis=None):
    """Two classical Gram-Schmidt passes removing ``span(basis)`` from ``z``.

    ``weighted_basis`` is ``B @ basis`` for B-orthogonal projection; the
    Euclidean projection is used when it is ``None``.
    """
    z = np.array(z, dtype=np.float64, copy=True)
    if basis is None or basis.shape[1] == 0:
        return z
    wb = basis if weighted_basis is None else weighted_basis
    for _ in range(2):
        z -= basis @ (wb.T @ z)
    return z


def orthonormalize_against(z, basis, B: SparseSymMatrix | None = None,
                           drop_tol: float = DROP_TOL, counter=None):
    """Orthonormalize ``z`` against an orthonormal ``basis``.

    Parameters
    ----------
    z : ndarray, shape (n,)
    basis : ndarray of shape (n, k) or list of vectors
        Orthonormal in the chosen inner product.
    B : SparseSymMatrix, optional
        If given, the B-inner product is used for both projection and
        normalization; otherwise the Euclidean one.
    drop_tol : float
        Relative norm below which ``z`` is declared to lie in the span.

    Returns
    -------
    ndarray or None
        The unit vector, or ``None`` when ``z`` is degenerate.
    """
    z = np.asarray(z, dtype=np.float64)
    if isinstance(basis, (list, tuple)):
        basis = np.column_stack(basis) if len(basis) else np.zeros((z.shape[0], 0))
    if B is None:
        norm = np.linalg.norm
        wb = None
    else:
        def norm(v):
            return b_norm(B, v, counter)
        wb = spmv(B, basis, counter) if basis.shape[1] else None
    before = norm(z)
    if before == 0.0:
        return None
    z = project_out(z, basis, wb)
    after = norm(z)
    if after <= drop_tol * before:
        return None
    return z / after


def rayleigh_quotient(A: SparseSymMatrix, B: SparseSymMatrix, x, counter=None) -> float:
    x = np.asarray(x, dtype=np.float64)
    xbx = float(x @ spmv(B, x, counter))
    if xbx <= 0.0:
        raise ValueError(f"x^T B x = {xbx:g} <= 0; B must be positive definite")
    return float(x @ spmv(A, x, counter)) / xbx


def relative_residual_from_products(ax, bx, theta, x, theta_floor):
    """``||Ax - theta Bx|| / (max(|theta|, floor) ||x||)`` from precomputed products."""
    denom = max(abs(theta), theta_floor) * np.linalg.norm(x)
    return float(np.linalg.norm(ax - theta * bx) / denom)


def relative_residual(A: SparseSymMatrix, B: SparseSymMatrix, theta: float, x,
                      counter=None, theta_floor: float | None = None) -> float:
    """Relative residual norm of the approximate eigenpair ``(theta, x)``.

    The floor defaults to ``1e-12 * ||A||_inf`` and guards ``theta`` near zero.
    """
    if theta_floor is None:
        theta_floor = 1e-12 * A.norm_inf()
    x = np.asarray(x, dtype=np.float64)
    return relative_residual_from_products(spmv(A, x, counter), spmv(B, x, counter),
                                           theta, x, theta_floor)

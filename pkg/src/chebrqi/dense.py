"""Small dense symmetric eigensolvers and the brute-force oracle."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

ORACLE_MAX_N = 5000
JACOBI_MAX_SWEEPS = 30


class DenseEigResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class CholeskyBreakdown(np.linalg.LinAlgError):
    """Projected B block is not numerically positive definite."""

    def __init__(self, pivot, value):
        super().__init__(f"Cholesky breakdown at pivot {pivot} (value {value:.3e})")
        self.pivot = pivot


class JacobiNotConverged(RuntimeError):
    pass


def _check_symmetric(M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-13 * scale:
        raise ValueError("matrix is not symmetric")
    return M


def jacobi_eig(M, max_sweeps: int = JACOBI_MAX_SWEEPS) -> DenseEigResult:
    """Cyclic Jacobi rotations; slow, used as an independent check of :func:`sym_eig`."""
    A = _check_symmetric(M).copy()
    n = A.shape[0]
    V = np.eye(n)
    fro = np.linalg.norm(A)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-14 * fro or n == 1:
            break
        if sweep == max_sweeps:
            raise JacobiNotConverged(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e}, "
                f"||M||_F {fro:.3e})")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff
                else:
                    tau = diff / (2.0 * apq)
                    t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    order = np.argsort(np.diag(A), kind="stable")
    return DenseEigResult(np.diag(A)[order].copy(), V[:, order])


def sym_eig(M) -> DenseEigResult:
    """Full spectrum of a symmetric matrix, ascending (LAPACK ``syevd``)."""
    M = _check_symmetric(M)
    values, vectors = np.linalg.eigh(M)
    return DenseEigResult(values, vectors)


def cholesky(M) -> np.ndarray:
    """Lower Cholesky factor, raising :class:`CholeskyBreakdown` with the pivot."""
    L, info = scipy.linalg.lapack.dpotrf(np.asarray(M, dtype=np.float64), lower=1, clean=1)
    if info > 0:
        raise CholeskyBreakdown(info - 1, M[info - 1, info - 1])
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    return L


def sym_gen_eig(A, B) -> DenseEigResult:
    """Solve ``A y = mu B y`` for symmetric ``A`` and SPD ``B``.

    Reduces through ``B = L L^T`` to the standard problem on
    ``L^{-1} A L^{-T}``; the returned vectors are B-orthonormal.
    """
    A = _check_symmetric(A)
    B = _check_symmetric(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    L = cholesky(B)
    tmp = scipy.linalg.solve_triangular(L, A, lower=True)
    C = scipy.linalg.solve_triangular(L, tmp.T, lower=True)
    C = 0.5 * (C + C.T)
    values, W = np.linalg.eigh(C)
    Y = scipy.linalg.solve_triangular(L, W, lower=True, trans="T")
    return DenseEigResult(values, Y)


def dense_oracle(A, B) -> DenseEigResult:
    """Full spectrum of the pencil by densification; eigenvectors B-orthonormal."""
    n = A.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"dense oracle limited to n <= {ORACLE_MAX_N}, got {n}")
    values, vectors = scipy.linalg.eigh(A.todense(), B.todense())
    return DenseEigResult(values, vectors)

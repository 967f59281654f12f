"""Iteration-capped conjugate residual and MINRES for symmetric systems.

Both start from the zero vector, use no preconditioner and never raise on
slow convergence: the iteration cap is the contract, and whatever iterate is
reached is returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

BREAKDOWN_TOL = 1e-30


@dataclass(frozen=True)
class InnerSolveConfig:
    method: str = "cr"
    max_iters: int = 50
    rel_tol: Optional[float] = None

    def __post_init__(self):
        if self.method not in ("cr", "minres"):
            raise ValueError(f"unknown inner method {self.method!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol is not None and not 0.0 < self.rel_tol <= 1.0:
            raise ValueError("rel_tol must lie in (0, 1]")


@dataclass
class InnerSolveReport:
    iters_used: int
    final_rel_residual: float
    breakdown: bool = False


def _as_apply(op):
    if hasattr(op, "apply"):
        return op.apply
    if callable(op):
        return op
    return lambda v: op @ v


def cr_solve(op, rhs, cfg: InnerSolveConfig,
             callback: Callable[[np.ndarray], None] | None = None):
    """Conjugate residual method.

    Parameters
    ----------
    op : operator with ``apply`` (e.g. :class:`~chebrqi.linalg.ShiftedOperator`),
        a dense/sparse matrix, or a callable
    rhs : ndarray
    cfg : InnerSolveConfig
    callback : callable, optional
        Called with each iterate.

    Returns
    -------
    x : ndarray
    report : InnerSolveReport

    Notes
    -----
    ``k`` iterations cost exactly ``k`` operator applications.
    """
    apply = _as_apply(op)
    b = np.asarray(rhs, dtype=np.float64)
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    if bnorm == 0.0:
        return x, InnerSolveReport(0, 0.0)
    r = b.copy()
    ar = apply(r)
    p = r.copy()
    ap = ar.copy()
    rar = r @ ar
    k = 0
    res = 1.0
    breakdown = False
    while k < cfg.max_iters:
        apap = ap @ ap
        if abs(rar) < BREAKDOWN_TOL * (r @ r) or apap == 0.0:
            breakdown = True
            break
        alpha = rar / apap
        x = x + alpha * p
        r = r - alpha * ap
        k += 1
        res = np.linalg.norm(r) / bnorm
        if callback is not None:
            callback(x)
        if k == cfg.max_iters or (cfg.rel_tol is not None and res <= cfg.rel_tol) or res == 0.0:
            break
        ar = apply(r)
        rar_new = r @ ar
        beta = rar_new / rar
        rar = rar_new
        p = r + beta * p
        ap = ar + beta * ap
    return x, InnerSolveReport(k, float(res), breakdown)


def minres_solve(op, rhs, cfg: InnerSolveConfig,
                 callback: Callable[[np.ndarray], None] | None = None):
    """MINRES (Lanczos tridiagonalization with Givens QR), Paige-Saunders form.

    Same contract as :func:`cr_solve`; robust for indefinite operators.
    """
    apply = _as_apply(op)
    b = np.asarray(rhs, dtype=np.float64)
    n = b.shape[0]
    x = np.zeros_like(b)
    beta1 = np.linalg.norm(b)
    if beta1 == 0.0:
        return x, InnerSolveReport(0, 0.0)

    v_old = np.zeros(n)
    v = b / beta1
    beta = 0.0
    w1 = np.zeros(n)
    w2 = np.zeros(n)
    cs, sn = -1.0, 0.0
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    k = 0
    res = 1.0
    breakdown = False
    while k < cfg.max_iters:
        av = apply(v)
        alpha = v @ av
        u = av - alpha * v - beta * v_old
        beta_next = np.linalg.norm(u)
        # previous rotations applied to the new column of the Lanczos matrix
        oldeps = epsln
        delta = cs * dbar + sn * alpha
        gbar = sn * dbar - cs * alpha
        epsln = sn * beta_next
        dbar = -cs * beta_next
        gamma = np.hypot(gbar, beta_next)
        if gamma == 0.0:
            breakdown = True
            break
        cs = gbar / gamma
        sn = beta_next / gamma
        phi = cs * phibar
        phibar = sn * phibar
        w_new = (v - oldeps * w1 - delta * w2) / gamma
        w1, w2 = w2, w_new
        x = x + phi * w_new
        k += 1
        res = abs(phibar) / beta1
        if callback is not None:
            callback(x)
        # a Lanczos coefficient at rounding level means an invariant subspace
        lucky = beta_next <= np.finfo(float).eps * (abs(alpha) + beta)
        if lucky or (cfg.rel_tol is not None and res <= cfg.rel_tol):
            break
        v_old, v = v, u / beta_next
        beta = beta_next
    return x, InnerSolveReport(k, float(res), breakdown)


def inner_solve(op, rhs, cfg: InnerSolveConfig, callback=None):
    solver = cr_solve if cfg.method == "cr" else minres_solve
    return solver(op, rhs, cfg, callback)

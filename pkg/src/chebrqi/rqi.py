"""Rayleigh quotient iteration, exact (dense) and the inexact single step."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .krylov import InnerSolveConfig, inner_solve
from .linalg import ShiftedOperator, SparsePencil

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RqiConfig:
    max_outer: int = 20
    eps: float = 1e-10
    inner: InnerSolveConfig = field(default_factory=InnerSolveConfig)

    def __post_init__(self):
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")


def rqi_exact(C, v0, cfg: RqiConfig = RqiConfig(), history: list | None = None) -> np.ndarray:
    """Rayleigh quotient iteration with dense direct solves.

    The stopping test uses the shift from before the solve,
    ``||C v_i - tau_i v_i|| < eps``. If ``history`` is given, that residual
    is appended after every step.
    """
    C = np.asarray(C, dtype=np.float64)
    n = C.shape[0]
    v = np.asarray(v0, dtype=np.float64)
    v = v / np.linalg.norm(v)
    scale = np.linalg.norm(C, 2)
    eye = np.eye(n)
    for _ in range(cfg.max_outer):
        cv = C @ v
        tau = float(cv @ v)
        if np.linalg.norm(cv - tau * v) == 0.0:
            if history is not None:
                history.append(0.0)
            return v
        try:
            vhat = np.linalg.solve(C - tau * eye, v)
        except np.linalg.LinAlgError:
            tau += 1e-14 * scale
            vhat = np.linalg.solve(C - tau * eye, v)
        v = vhat / np.linalg.norm(vhat)
        res = float(np.linalg.norm(C @ v - tau * v))
        if history is not None:
            history.append(res)
        if res < cfg.eps:
            break
    return v


def irqi_step(A, B, theta: float, x, inner: InnerSolveConfig, counter=None,
              report: list | None = None) -> np.ndarray:
    """One inexact RQI step with the shift correction dropped.

    Approximately solves ``(A - theta B) t = x`` from a zero initial guess
    with at most ``inner.max_iters`` Krylov steps and returns ``t``,
    converged or not. ``A``/``B`` are :class:`SparseSymMatrix`; pass an
    existing :class:`SparsePencil` as ``A`` (with ``B=None``) to share its
    MV counter.
    """
    pencil = A if isinstance(A, SparsePencil) else SparsePencil(A, B, counter)
    op = ShiftedOperator(pencil, theta)
    t, rep = inner_solve(op, x, inner)
    if rep.breakdown:
        log.debug("inner %s breakdown after %d iterations", inner.method, rep.iters_used)
    if report is not None:
        report.append(rep)
    return t

"""Chebyshev-Davidson (CD) and Chebyshev-RQI subspace (CRS) eigensolvers.

Both compute the ``nev`` smallest eigenpairs of ``A x = lambda B x`` one at a
time. For each pair a search space ``V`` is grown by Rayleigh-Ritz steps:

* CD appends the Chebyshev-filtered Ritz vector ``p(A - theta B) x``;
* CRS appends that vector and also ``t ~ (A - theta B)^{-1} x``, an inexact
  Rayleigh quotient step computed by a capped Krylov solve.

``V`` is kept Euclidean-orthonormal, so Rayleigh-Ritz works on the genuine
projected pencil ``(V^T A V, V^T B V)``. Converged vectors are locked in
``W`` and later search directions are kept B-orthogonal to them.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .dense import CholeskyBreakdown, sym_eig, sym_gen_eig
from .filter import FilterIntervalError, FilterParams, chebyshev_filter
from .krylov import InnerSolveConfig
from .linalg import (
    MvCounter,
    ShiftedOperator,
    SparsePencil,
    project_out,
    relative_residual_from_products,
)
from .rqi import irqi_step

log = logging.getLogger(__name__)

GAP_FLOOR = 1e-8
# Near convergence the new directions are tiny but still accurate after two
# Gram-Schmidt passes; only drop them at rounding level.
AUGMENT_DROP_TOL = 1e-14
RITZ_SLACK = 100.0


@dataclass(frozen=True)
class SolverConfig:
    nev: int = 10
    m: int = 30
    dim_max: int = 80
    it_max: int = 1000
    eps: float = 1e-10
    inner: InnerSolveConfig = field(default_factory=InnerSolveConfig)
    seed: int = 0

    def __post_init__(self):
        if self.nev < 1:
            raise ValueError("nev must be >= 1")
        if self.m < 1:
            raise ValueError("filter degree m must be >= 1")
        if self.dim_max < 3:
            raise ValueError("dim_max must be >= 3")
        if self.it_max < 1:
            raise ValueError("it_max must be >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def to_dict(self):
        return {
            "nev": self.nev, "m": self.m, "dim_max": self.dim_max, "it_max": self.it_max,
            "eps": self.eps, "seed": self.seed, "inner_method": self.inner.method,
            "inner_iters": self.inner.max_iters, "inner_rel_tol": self.inner.rel_tol,
        }

    @classmethod
    def from_dict(cls, d):
        inner = InnerSolveConfig(d.get("inner_method", "cr"), int(d.get("inner_iters", 50)),
                                 d.get("inner_rel_tol"))
        return cls(nev=int(d["nev"]), m=int(d["m"]), dim_max=int(d["dim_max"]),
                   it_max=int(d["it_max"]), eps=float(d["eps"]), inner=inner,
                   seed=int(d["seed"]))


@dataclass
class SubspaceState:
    """Search basis with its images and projected pencil.

    ``AV = A @ V`` and ``BV = B @ V`` are carried along so Ritz vectors,
    residuals and restarts cost no extra matrix-vector products.
    """

    V: np.ndarray
    AV: np.ndarray
    BV: np.ndarray
    Atil: np.ndarray
    Btil: np.ndarray
    theta: float = 0.0
    x: Optional[np.ndarray] = None
    filter: Optional[FilterParams] = None

    @property
    def dim(self) -> int:
        return self.V.shape[1]


class IterationRecord(NamedTuple):
    pair: int
    k: int
    theta: float
    residual: float
    dim: int


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray
    converged: np.ndarray
    it_total: int
    mv_total: int
    history: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return bool(len(self.converged)) and bool(np.all(self.converged))


def _as_pencil(A, B, counter):
    if isinstance(A, SparsePencil):
        return A
    return SparsePencil(A, B, counter)


def _sym_from_upper(M):
    return np.triu(M) + np.triu(M, 1).T


def initial_state(x, pencil: SparsePencil) -> SubspaceState:
    """One-dimensional state ``V = [x / ||x||]``; costs two MVs."""
    v = (x / np.linalg.norm(x))[:, None]
    AV = pencil.mul_a(v)
    BV = pencil.mul_b(v)
    Atil = v.T @ AV
    Btil = v.T @ BV
    theta = float(Atil[0, 0] / Btil[0, 0])
    return SubspaceState(v, AV, BV, Atil, Btil, theta, v[:, 0].copy())


def update_projection(state: SubspaceState, new_vecs, A, B=None, counter=None) -> SubspaceState:
    """Append orthonormalized columns and extend ``V^T A V`` / ``V^T B V``.

    Only the new off-diagonal blocks ``V^T A Z`` and the small block
    ``Z^T A Z`` (upper triangle, mirrored) are computed; the existing block
    is reused verbatim.
    """
    pencil = _as_pencil(A, B, counter)
    Z = np.asarray(new_vecs, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[:, None]
    elif Z.shape[0] != state.V.shape[0]:
        Z = np.column_stack(list(new_vecs))
    AZ = pencil.mul_a(Z)
    BZ = pencil.mul_b(Z)

    def grow(T, VM, ZM):
        k, p = T.shape[0], ZM.shape[1]
        out = np.empty((k + p, k + p))
        out[:k, :k] = T
        cross = state.V.T @ ZM
        out[:k, k:] = cross
        out[k:, :k] = cross.T
        out[k:, k:] = _sym_from_upper(Z.T @ ZM)
        return out

    return SubspaceState(
        V=np.hstack([state.V, Z]),
        AV=np.hstack([state.AV, AZ]),
        BV=np.hstack([state.BV, BZ]),
        Atil=grow(state.Atil, state.AV, AZ),
        Btil=grow(state.Btil, state.BV, BZ),
        theta=state.theta,
        x=state.x,
        filter=state.filter,
    )


def select_filter_params(state: SubspaceState, theta: float, m: int = 30,
                         gap_floor: float = GAP_FLOOR) -> FilterParams:
    """Filter bounds from the spectrum of ``Atil - theta Btil``.

    ``sigma1``, ``a`` and ``b`` are its smallest, second smallest and
    largest eigenvalues. Only ``a`` is adjusted here (when it collides with
    ``sigma1``); a collapsed ``[a, b]`` is left for :func:`widen_interval`.
    """
    if state.dim < 2:
        raise ValueError("need at least two basis vectors to select filter bounds")
    ev = sym_eig(state.Atil - theta * state.Btil).values
    sigma1, a, b = float(ev[0]), float(ev[1]), float(ev[-1])
    floor = gap_floor * max(1.0, abs(b))
    if a <= sigma1 + floor:
        log.info("clustered Ritz values (sigma1=%g, a=%g); widening a", sigma1, a)
        a = sigma1 + floor
        b = max(b, a)
    return FilterParams(m, a, b, sigma1)


def widen_interval(p: FilterParams, gap_floor: float = GAP_FLOOR) -> FilterParams:
    return replace(p, b=p.a + gap_floor * max(1.0, abs(p.b)))


class _Driver:
    """Shared outer loop; ``use_rqi`` switches CD to CRS."""

    def __init__(self, A, B, cfg: SolverConfig, use_rqi: bool, counter: MvCounter | None):
        self.pencil = _as_pencil(A, B, counter)
        self.cfg = cfg
        self.use_rqi = use_rqi
        self.n = self.pencil.n
        self.rng = np.random.default_rng(cfg.seed)
        self.theta_floor = 1e-12 * self.pencil.a_norm_inf
        self.W = np.zeros((self.n, 0))
        self.BW = np.zeros((self.n, 0))
        self.events = []

    def _event(self, msg):
        log.info(msg)
        self.events.append(msg)

    def _random_unit(self):
        return self.rng.uniform(-1.0, 1.0, self.n)

    def _orthonormalize(self, z, V):
        """Remove ``W`` (B-inner product) then ``V`` (Euclidean); ``None`` if degenerate."""
        norm0 = np.linalg.norm(z)
        if norm0 == 0.0 or not np.isfinite(norm0):
            return None
        # The V projection can cancel most of z, which would magnify rounding
        # left by the W projection; repeat the combined sweep until the norm
        # stops collapsing.
        nz = norm0
        for _ in range(3):
            z = project_out(z, self.W, self.BW)
            z = project_out(z, V)
            prev, nz = nz, np.linalg.norm(z)
            if nz <= AUGMENT_DROP_TOL * norm0:
                return None
            if nz > 0.5 * prev:
                break
        return z / nz

    def _replacement(self, V, what):
        self._event(f"degenerate {what}; replaced by random vector")
        for _ in range(10):
            z = self._orthonormalize(self._random_unit(), V)
            if z is not None:
                return z
        raise RuntimeError("could not extend the search space with a random vector")

    def _rebuild(self, state: SubspaceState) -> SubspaceState:
        Q, _ = np.linalg.qr(state.V)
        Q = project_out(Q, self.W, self.BW)
        Q, _ = np.linalg.qr(Q)
        AV = self.pencil.mul_a(Q)
        BV = self.pencil.mul_b(Q)
        return SubspaceState(Q, AV, BV, _sym_from_upper(Q.T @ AV), _sym_from_upper(Q.T @ BV),
                             state.theta, state.x, state.filter)

    def _ritz(self, state: SubspaceState):
        try:
            return state, sym_gen_eig(state.Atil, state.Btil)
        except CholeskyBreakdown as exc:
            self._event(f"projected B not SPD ({exc}); rebuilding basis")
            state = self._rebuild(state)
            return state, sym_gen_eig(state.Atil, state.Btil)

    def _filter(self, C, x, params):
        try:
            return chebyshev_filter(C, x, params), params
        except FilterIntervalError:
            params = widen_interval(params)
            log.debug("filter interval widened to [%g, %g]", params.a, params.b)
            return chebyshev_filter(C, x, params), params

    def solve(self) -> EigResult:
        cfg = self.cfg
        start_mv = self.pencil.counter.count
        values, vectors, converged, iterations, history = [], [], [], [], []
        it_total = 0
        x = self._random_unit()
        for pair in range(cfg.nev):
            x = project_out(x, self.W, self.BW)
            state = initial_state(x, self.pencil)
            theta = state.theta
            ax, bx = state.AV[:, 0], state.BV[:, 0]
            x = state.V[:, 0]
            res = relative_residual_from_products(ax, bx, theta, x, self.theta_floor)
            params = None
            basis_at_lock = None
            locked = False
            for k in range(1, cfg.it_max + 1):
                history.append(IterationRecord(pair, k, theta, res, state.dim))
                if res < cfg.eps:
                    it_total += k
                    iterations.append(k)
                    locked = True
                    break
                growth = 2 if (self.use_rqi and k > 1) else 1
                if state.dim + growth > cfg.dim_max:
                    nx = np.linalg.norm(x)
                    v = (x / nx)[:, None]
                    Atil = np.array([[v[:, 0] @ (ax / nx)]])
                    Btil = np.array([[v[:, 0] @ (bx / nx)]])
                    state = SubspaceState(v, (ax / nx)[:, None], (bx / nx)[:, None], Atil, Btil,
                                          float(Atil[0, 0] / Btil[0, 0]), v[:, 0].copy(), params)
                    theta = state.theta
                    x, ax, bx = state.V[:, 0], state.AV[:, 0], state.BV[:, 0]
                C = ShiftedOperator(self.pencil, theta)
                t = None
                if k == 1:
                    z = ax - theta * bx
                else:
                    z, params = self._filter(C, x, params)
                    if self.use_rqi:
                        t = irqi_step(self.pencil, None, theta, x, cfg.inner)
                zq = self._orthonormalize(z, state.V)
                if zq is None:
                    zq = self._replacement(state.V, "filtered vector")
                new = [zq]
                if t is not None:
                    tq = self._orthonormalize(t, np.column_stack([state.V, zq]))
                    if tq is None:
                        self._event(f"degenerate RQI vector dropped (pair {pair}, k={k})")
                    else:
                        new.append(tq)
                state = update_projection(state, np.column_stack(new), self.pencil)
                params = select_filter_params(state, theta, cfg.m)
                state, (mu, Y) = self._ritz(state)
                theta_new = float(mu[0])
                # Ritz values are only accurate to about eps * max|mu|
                slack = RITZ_SLACK * np.finfo(float).eps * float(np.abs(mu).max())
                if theta_new > theta + slack:
                    log.warning("Ritz value increased from %.17g to %.17g (pair %d, k=%d)",
                                theta, theta_new, pair, k)
                theta = theta_new
                y1 = Y[:, 0]
                x = state.V @ y1
                ax = state.AV @ y1
                bx = state.BV @ y1
                state.theta, state.x, state.filter = theta, x, params
                res = relative_residual_from_products(ax, bx, theta, x, self.theta_floor)
                basis_at_lock = (state.V, Y[:, 1])
            if not locked:
                it_total += cfg.it_max
                iterations.append(cfg.it_max)
            bnorm = np.sqrt(x @ bx)
            w = x / bnorm
            values.append(theta)
            vectors.append(w)
            converged.append(locked)
            if not locked:
                self._event(f"pair {pair} not converged after {cfg.it_max} iterations")
                break
            self.W = np.column_stack([self.W, w])
            self.BW = np.column_stack([self.BW, bx / bnorm])
            if basis_at_lock is None:
                self._event(f"pair {pair} converged without a Ritz step; restarting from random")
                x = self._random_unit()
            else:
                V_n, y2 = basis_at_lock
                x = V_n @ y2
        return EigResult(
            values=np.array(values),
            vectors=np.column_stack(vectors) if vectors else np.zeros((self.n, 0)),
            converged=np.array(converged, dtype=bool),
            it_total=it_total,
            mv_total=self.pencil.counter.count - start_mv,
            history=history,
            iterations=iterations,
            events=self.events,
        )


def cd_solve(A, B, cfg: SolverConfig = SolverConfig(), counter: MvCounter | None = None) -> EigResult:
    """Chebyshev-Davidson: ``nev`` smallest eigenpairs of the pencil ``(A, B)``."""
    return _Driver(A, B, cfg, use_rqi=False, counter=counter).solve()


def crs_solve(A, B, cfg: SolverConfig = SolverConfig(), counter: MvCounter | None = None) -> EigResult:
    """Chebyshev-RQI subspace iteration: CD plus an inexact RQI vector per step."""
    return _Driver(A, B, cfg, use_rqi=True, counter=counter).solve()

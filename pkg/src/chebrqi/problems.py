"""Test pencils: a clamped plane-strain beam and a 1-D Dirichlet Laplacian."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import SparseSymMatrix

LENGTH = 10.0
HEIGHT = 2.0

_GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)
# Q1 reference nodes in counter-clockwise order
_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_ETA = np.array([-1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class BeamSpec:
    nx: int
    ny: int
    E: float = 1.0
    nu: float = 0.3
    rho: float = 1.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("nx and ny must be >= 1")
        if not 0.0 < self.nu < 0.5:
            raise ValueError("Poisson ratio must lie in (0, 0.5)")
        if self.E <= 0 or self.rho <= 0:
            raise ValueError("E and rho must be positive")

    @property
    def lame(self):
        mu = self.E / (2.0 * (1.0 + self.nu))
        lam = self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
        return lam, mu


@dataclass
class AssembledPencil:
    K: SparseSymMatrix
    M: SparseSymMatrix
    n_free: int
    dof_map: np.ndarray  # global dof -> matrix index, -1 for eliminated dofs


def beam_element_matrices(hx, hy, lam, mu, rho):
    """Q1 element stiffness and mass (8x8) with 2x2 Gauss quadrature.

    Dof order is ``(u0, v0, u1, v1, ...)`` over the nodes in :data:`_XI`/:data:`_ETA`.
    """
    D = np.array([[lam + 2 * mu, lam, 0.0],
                  [lam, lam + 2 * mu, 0.0],
                  [0.0, 0.0, mu]])
    detj = 0.25 * hx * hy
    Ke = np.zeros((8, 8))
    Me = np.zeros((8, 8))
    for xi in _GAUSS:
        for eta in _GAUSS:
            N = 0.25 * (1 + _XI * xi) * (1 + _ETA * eta)
            dNdx = 0.25 * _XI * (1 + _ETA * eta) * (2.0 / hx)
            dNdy = 0.25 * _ETA * (1 + _XI * xi) * (2.0 / hy)
            Bm = np.zeros((3, 8))
            Bm[0, 0::2] = dNdx
            Bm[1, 1::2] = dNdy
            Bm[2, 0::2] = dNdy
            Bm[2, 1::2] = dNdx
            Ke += Bm.T @ D @ Bm * detj
            Nm = np.zeros((2, 8))
            Nm[0, 0::2] = N
            Nm[1, 1::2] = N
            Me += rho * Nm.T @ Nm * detj
    return 0.5 * (Ke + Ke.T), 0.5 * (Me + Me.T)


def _assemble_beam_full(spec: BeamSpec):
    nx, ny = spec.nx, spec.ny
    hx, hy = LENGTH / nx, HEIGHT / ny
    lam, mu = spec.lame
    Ke, Me = beam_element_matrices(hx, hy, lam, mu, spec.rho)
    node = lambda i, j: j * (nx + 1) + i  # noqa: E731
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ii, jj = ii.ravel(), jj.ravel()
    nodes = np.stack([node(ii, jj), node(ii + 1, jj), node(ii + 1, jj + 1), node(ii, jj + 1)], axis=1)
    dofs = np.empty((nodes.shape[0], 8), dtype=np.int64)
    dofs[:, 0::2] = 2 * nodes
    dofs[:, 1::2] = 2 * nodes + 1
    rows = np.repeat(dofs, 8, axis=1).ravel()
    cols = np.tile(dofs, (1, 8)).ravel()
    ndof = 2 * (nx + 1) * (ny + 1)
    K = sp.coo_matrix((np.tile(Ke.ravel(), nodes.shape[0]), (rows, cols)), shape=(ndof, ndof)).tocsr()
    M = sp.coo_matrix((np.tile(Me.ravel(), nodes.shape[0]), (rows, cols)), shape=(ndof, ndof)).tocsr()
    return K, M


def free_dofs(nx: int, ny: int) -> np.ndarray:
    """Global dofs left after clamping the edge ``x = 0``, in increasing order."""
    ndof = 2 * (nx + 1) * (ny + 1)
    node_i = (np.arange(ndof) // 2) % (nx + 1)
    return np.flatnonzero(node_i != 0)


def assemble_beam(spec: BeamSpec, clamp: bool = True) -> AssembledPencil:
    """Stiffness/mass pencil of a plane-strain beam on ``[0, 10] x [0, 2]``.

    Bilinear quadrilaterals on a uniform ``nx x ny`` grid. With ``clamp``
    the dofs on the edge ``x = 0`` are eliminated, leaving
    ``2 nx (ny + 1)`` unknowns; without it the free (singular) operator is
    returned.
    """
    K, M = _assemble_beam_full(spec)
    ndof = K.shape[0]
    keep = free_dofs(spec.nx, spec.ny) if clamp else np.arange(ndof)
    dof_map = -np.ones(ndof, dtype=np.int64)
    dof_map[keep] = np.arange(keep.size)
    K = K[keep][:, keep]
    M = M[keep][:, keep]
    return AssembledPencil(SparseSymMatrix.symmetrized(K, "A"), SparseSymMatrix.symmetrized(M, "B"),
                           keep.size, dof_map)


def assemble_laplacian_1d(n: int, mass: str = "consistent") -> AssembledPencil:
    """Linear-element pencil for ``-u'' = lambda u`` on ``(0, 1)`` with Dirichlet ends.

    ``mass="consistent"`` gives ``A = tridiag(-1, 2, -1) / h`` and
    ``B = h tridiag(1, 4, 1) / 6`` with eigenvalues
    ``(6 / h^2) (1 - cos(i pi h)) / (2 + cos(i pi h))``.
    ``mass="identity"`` gives the finite-difference pair
    ``(tridiag(-1, 2, -1) / h^2, I)`` with eigenvalues ``4 sin^2(i pi h / 2) / h^2``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    h = 1.0 / (n + 1)
    lap = sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")
    if mass == "consistent":
        A = lap / h
        B = sp.diags([np.ones(n - 1), 4 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], format="csr") * (h / 6)
    elif mass == "identity":
        A = lap / h**2
        B = sp.identity(n, format="csr")
    else:
        raise ValueError(f"unknown mass option {mass!r}")
    return AssembledPencil(SparseSymMatrix(A, "A"), SparseSymMatrix(B, "B"), n, np.arange(n))


def laplacian_1d_eigenvalues(n: int, mass: str = "consistent") -> np.ndarray:
    h = 1.0 / (n + 1)
    i = np.arange(1, n + 1)
    if mass == "consistent":
        c = np.cos(i * np.pi * h)
        return (6.0 / h**2) * (1 - c) / (2 + c)
    return 4.0 * np.sin(i * np.pi * h / 2) ** 2 / h**2

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from chebrqi import (
    MvCounter,
    ShiftedOperator,
    SparsePencil,
    SparseSymMatrix,
    b_inner,
    dense_oracle,
    orthonormalize_against,
    rayleigh_quotient,
    relative_residual,
    spmv,
)
from chebrqi.linalg import TallyCounter, b_norm, project_out

from conftest import random_spd, random_sym, sym


# -- SparseSymMatrix -----------------------------------------------------------

def test_matrix_rejects_asymmetric_values():
    with pytest.raises(ValueError):
        sym([[1.0, 2.0], [2.0 + 1e-15, 1.0]])


def test_matrix_rejects_non_square_and_empty():
    with pytest.raises(ValueError):
        SparseSymMatrix(sp.csr_matrix(np.ones((2, 3))))
    with pytest.raises(ValueError):
        SparseSymMatrix(sp.csr_matrix((0, 0)))


def test_matrix_structure_is_symmetric_and_sorted():
    M = sym([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]])
    csr = M.csr
    pattern = (csr != 0).astype(int)
    assert (pattern != pattern.T).nnz == 0
    for i in range(M.n):
        cols = csr.indices[csr.indptr[i]:csr.indptr[i + 1]]
        assert np.all(np.diff(cols) > 0)
    assert M.nnz == 5


def test_symmetrized_averages_triangles():
    M = SparseSymMatrix.symmetrized(sp.csr_matrix(np.array([[1.0, 2.0], [4.0, 1.0]])))
    assert np.array_equal(M.todense(), [[1.0, 3.0], [3.0, 1.0]])


# -- spmv --------------------------------------------------------------------

@pytest.mark.parametrize("dense, x, expected", [
    (np.eye(2), [3.0, -1.0], [3.0, -1.0]),
    (np.diag([1.0, 2.0]), [1.0, 1.0], [1.0, 2.0]),
    ([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [3.0, 3.0]),
])
def test_spmv_examples(dense, x, expected):
    c = MvCounter()
    assert np.allclose(spmv(sym(dense), x, c), expected, rtol=0, atol=0)
    assert c.count == 1


def test_spmv_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        spmv(sym(np.eye(2)), np.ones(3))


def test_spmv_block_counts_columns():
    c = MvCounter()
    spmv(sym(np.eye(3)), np.ones((3, 4)), c)
    assert c.count == 4


def test_counter_never_decreases():
    c = TallyCounter()
    seen = [c.count]
    for k in (1, 3, 0, 2):
        c.increment(k, "A")
        seen.append(c.count)
    assert seen == sorted(seen)
    assert c.by_label["A"] == 6


@given(st.integers(2, 40), st.integers(0, 2**31 - 1))
def test_operator_self_adjoint(n, seed):
    rng = np.random.default_rng(seed)
    M = random_sym(rng, n)
    u, v = rng.standard_normal(n), rng.standard_normal(n)
    lhs = spmv(M, u) @ v
    rhs = u @ spmv(M, v)
    scale = abs(M.todense()).max() * n * np.linalg.norm(u) * np.linalg.norm(v)
    assert abs(lhs - rhs) <= 1e-13 * scale


def test_shifted_operator_costs_two_mvs():
    A, B = sym(np.diag([2.0, 6.0]), "A"), sym(np.diag([1.0, 2.0]), "B")
    c = TallyCounter()
    op = ShiftedOperator(SparsePencil(A, B, c), 2.0)
    assert np.allclose(op.apply(np.array([1.0, 1.0])), [0.0, 2.0])
    assert c.count == 2
    assert c.by_label == {"A": 1, "B": 1}


# -- b_inner -----------------------------------------------------------------

@pytest.mark.parametrize("B, u, v, expected", [
    (np.eye(2), [1, 0], [1, 0], 1.0),
    (np.diag([1.0, 2.0]), [1, 1], [1, 1], 3.0),
    (np.diag([1.0, 2.0]), [1, 0], [0, 1], 0.0),
])
def test_b_inner_examples(B, u, v, expected):
    assert b_inner(sym(B), u, v) == expected


def test_b_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        b_inner(sym(np.eye(2)), [1.0, 0.0], [1.0, 0.0, 0.0])


def test_b_norm():
    assert b_norm(sym(np.diag([1.0, 4.0])), [0.0, 1.0]) == 2.0


# -- orthonormalize_against ----------------------------------------------------

def test_orthonormalize_axis_projection():
    out = orthonormalize_against(np.array([1.0, 1.0]), [np.array([1.0, 0.0])])
    assert np.allclose(out, [0.0, 1.0], atol=1e-15)


def test_orthonormalize_degenerate():
    assert orthonormalize_against(np.array([1.0, 0.0]), [np.array([1.0, 0.0])]) is None
    assert orthonormalize_against(np.zeros(2), [np.array([1.0, 0.0])]) is None


def test_orthonormalize_b_weighted():
    B = sym(np.diag([1.0, 4.0]))
    out = orthonormalize_against(np.array([1.0, 1.0]), [np.array([1.0, 0.0])], B=B)
    assert np.allclose(out, [0.0, 0.5], atol=1e-15)


def test_orthonormalize_empty_basis_normalizes():
    out = orthonormalize_against(np.array([3.0, 4.0]), [])
    assert np.allclose(out, [0.6, 0.8])


def test_orthonormalize_counts_b_products():
    B = sym(np.diag([1.0, 4.0, 9.0]))
    c = MvCounter()
    orthonormalize_against(np.ones(3), [np.array([1.0, 0.0, 0.0])], B=B, counter=c)
    # one block product for B*basis, then B-norms before and after
    assert c.count == 3


@given(st.integers(5, 60), st.integers(1, 50), st.integers(0, 2**31 - 1))
def test_orthonormalize_builds_orthonormal_basis(n, k, seed):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    cols = []
    for _ in range(k):
        v = orthonormalize_against(rng.standard_normal(n), cols)
        assert v is not None
        cols.append(v)
    V = np.column_stack(cols)
    assert np.abs(V.T @ V - np.eye(k)).max() <= 1e-12


@given(st.integers(5, 60), st.integers(1, 50), st.integers(0, 2**31 - 1))
def test_orthonormalize_builds_b_orthonormal_basis(n, k, seed):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    B = random_spd(rng, n)
    cols = []
    for _ in range(k):
        v = orthonormalize_against(rng.standard_normal(n), cols, B=B)
        assert v is not None
        cols.append(v)
    V = np.column_stack(cols)
    assert np.abs(V.T @ (B.csr @ V) - np.eye(k)).max() <= 1e-10


def test_project_out_b_weighted_removes_component():
    rng = np.random.default_rng(0)
    B = random_spd(rng, 20)
    w = rng.standard_normal(20)
    w /= b_norm(B, w)
    z = project_out(rng.standard_normal(20), w[:, None], (B.csr @ w)[:, None])
    assert abs(b_inner(B, z, w)) < 1e-13


# -- Rayleigh quotient and residual ------------------------------------------

@pytest.mark.parametrize("A, B, x, expected", [
    (np.diag([1.0, 2.0]), np.eye(2), [1.0, 0.0], 1.0),
    (np.diag([1.0, 3.0]), np.eye(2), [1.0, 1.0], 2.0),
    (np.diag([1.0, 3.0]), np.diag([1.0, 2.0]), [1.0, 1.0], 4.0 / 3.0),
])
def test_rayleigh_quotient_examples(A, B, x, expected):
    assert rayleigh_quotient(sym(A), sym(B), x) == pytest.approx(expected, rel=1e-15)


def test_rayleigh_quotient_rejects_indefinite_b():
    with pytest.raises(ValueError, match="positive definite"):
        rayleigh_quotient(sym(np.eye(2)), sym(np.diag([1.0, -1.0])), [0.0, 1.0])


@given(st.integers(2, 50), st.integers(0, 2**31 - 1))
def test_rayleigh_quotient_within_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    A, B = random_sym(rng, n), random_spd(rng, n)
    lam = dense_oracle(A, B).values
    x = rng.standard_normal(n)
    rq = rayleigh_quotient(A, B, x)
    slack = 1e-12 * max(abs(lam[0]), abs(lam[-1]))
    assert lam[0] - slack <= rq <= lam[-1] + slack


@pytest.mark.parametrize("A, B, theta, x, expected", [
    (np.diag([2.0, 6.0]), np.diag([1.0, 2.0]), 2.0, [1.0, 0.0], 0.0),
    (np.diag([1.0, 3.0]), np.eye(2), 1.0, [0.0, 1.0], 2.0),
    (np.diag([1.0, 3.0]), np.eye(2), 2.0, np.array([1.0, 1.0]) / np.sqrt(2), 0.5),
])
def test_relative_residual_examples(A, B, theta, x, expected):
    assert relative_residual(sym(A), sym(B), theta, x) == pytest.approx(expected, abs=1e-15)


def test_relative_residual_floor_guards_zero_shift():
    A, B = sym(np.diag([0.0, 1.0])), sym(np.eye(2))
    r = relative_residual(A, B, 0.0, [0.0, 1.0])
    assert np.isfinite(r)
    assert r == pytest.approx(1.0 / 1e-12)

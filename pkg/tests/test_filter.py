import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chebrqi import FilterParams, ShiftedOperator, SparsePencil, cheb_poly_value, chebyshev_filter
from chebrqi.filter import FilterIntervalError, cheb_poly_recurrence, filter_gain_profile
from chebrqi.linalg import TallyCounter

from conftest import sym


def diag_op(d):
    d = np.asarray(d, dtype=float)
    return lambda v: d * v


def random_params(rng, m_max=40):
    m = int(rng.integers(1, m_max + 1))
    a = rng.uniform(-5.0, 5.0)
    b = a + 10 ** rng.uniform(-1.0, 1.0)
    sigma1 = a - (b - a) * 10 ** rng.uniform(-2.0, 0.5)
    return FilterParams(m, a, b, sigma1)


def exact_gain(p, t):
    with mpmath.workdps(40):
        scale = mpmath.mpf(2) / (mpmath.mpf(p.b) - mpmath.mpf(p.a))
        num = mpmath.chebyt(p.m, 1 + (mpmath.mpf(t) - p.b) * scale)
        den = mpmath.chebyt(p.m, 1 + (mpmath.mpf(p.sigma1) - p.b) * scale)
        return float(num / den)


# -- scalar Chebyshev --------------------------------------------------------

@pytest.mark.parametrize("m, t, expected", [(0, 0.7, 1.0), (3, 0.5, -1.0), (2, -3.0, 17.0)])
def test_cheb_poly_examples(m, t, expected):
    assert cheb_poly_value(m, t) == pytest.approx(expected, abs=1e-14)


@given(st.integers(1, 30), st.floats(-3.0, 3.0))
def test_cheb_poly_three_term_recurrence(m, t):
    lhs = cheb_poly_value(m + 1, t)
    rhs = 2 * t * cheb_poly_value(m, t) - cheb_poly_value(m - 1, t)
    scale = max(abs(lhs), abs(2 * t * cheb_poly_value(m, t)), 1.0)
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(st.integers(0, 25), st.floats(-2.5, 2.5))
def test_cheb_poly_matches_recurrence_form(m, t):
    a, b = cheb_poly_value(m, t), cheb_poly_recurrence(m, t)
    assert abs(a - b) <= 1e-11 * max(abs(a), 1.0)


def test_cheb_poly_rejects_negative_degree():
    with pytest.raises(ValueError):
        cheb_poly_value(-1, 0.0)


# -- filter examples ---------------------------------------------------------

C3 = diag_op([0.0, 2.0, 4.0])


def test_filter_anchor_is_one():
    z = chebyshev_filter(C3, np.array([1.0, 0.0, 0.0]), FilterParams(1, 2.0, 4.0, 0.0))
    assert np.allclose(z, [1.0, 0.0, 0.0], atol=1e-15)


def test_filter_degree_one_value():
    z = chebyshev_filter(C3, np.array([0.0, 1.0, 0.0]), FilterParams(1, 2.0, 4.0, 0.0))
    assert np.allclose(z, [0.0, 1.0 / 3.0, 0.0], atol=1e-15)


def test_filter_degree_two_value():
    z = chebyshev_filter(C3, np.array([0.0, 1.0, 0.0]), FilterParams(2, 2.0, 4.0, 0.0))
    assert np.allclose(z, [0.0, 1.0 / 17.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("t, expected", [(0.0, 1.0), (4.0, -1.0 / 3.0), (3.0, 0.0)])
def test_gain_profile_examples(t, expected):
    assert filter_gain_profile(FilterParams(1, 2.0, 4.0, 0.0), [t])[0] == pytest.approx(expected, abs=1e-15)


# -- parameter validation ------------------------------------------------------

@pytest.mark.parametrize("params", [
    FilterParams(3, 1.0, 1.0, 0.0),              # collapsed interval
    FilterParams(3, 1.0, 1.0 + 1e-16, 0.0),
    FilterParams(3, 1.0, 2.0, 1.5),              # anchor inside [a, b]
    FilterParams(3, 1.0, 2.0, 1.0),
])
def test_filter_rejects_bad_interval(params):
    with pytest.raises(FilterIntervalError):
        chebyshev_filter(C3, np.ones(3), params)


def test_filter_rejects_zero_degree():
    with pytest.raises(ValueError):
        chebyshev_filter(C3, np.ones(3), FilterParams(0, 2.0, 4.0, 0.0))


# -- invariants --------------------------------------------------------------

@given(st.integers(1, 20), st.integers(1, 10), st.integers(0, 2**31 - 1))
def test_filter_matches_scalar_profile_on_diagonal(n, m, seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng, m_max=1)
    p = FilterParams(m, p.a, p.b, p.sigma1)
    d = rng.uniform(p.sigma1, p.b, n)
    gains = np.array(filter_gain_profile(p, d))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        z = chebyshev_filter(diag_op(d), e, p)
        assert np.linalg.norm(z - gains[i] * e) <= 1e-11 * abs(gains[i])


@given(st.integers(0, 2**31 - 1))
def test_filter_agrees_with_high_precision_reference(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    d = np.concatenate([[p.sigma1], rng.uniform(p.sigma1, p.b, 15)])
    z = chebyshev_filter(diag_op(d), np.ones_like(d), p)
    ref = np.array([exact_gain(p, t) for t in d])
    assert np.linalg.norm(z - ref) <= 1e-12 * np.linalg.norm(ref)


@given(st.integers(0, 2**31 - 1))
def test_filter_damping_bound(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    bound = 1.0 / abs(cheb_poly_value(p.m, 1.0 + 2.0 * (p.sigma1 - p.b) / (p.b - p.a)))
    ts = np.linspace(p.a, p.b, 1000)
    assert np.max(np.abs(filter_gain_profile(p, ts))) <= bound * (1 + 1e-12)
    z = chebyshev_filter(diag_op(ts), np.ones_like(ts), p)
    assert np.max(np.abs(z)) <= bound * (1 + 1e-10)


@given(st.integers(2, 30), st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_filter_linearity(n, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    p = random_params(rng, m_max=15)
    d = rng.uniform(p.sigma1, p.b, n)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    op = diag_op(d)
    lhs = chebyshev_filter(op, alpha * x + beta * y, p)
    rhs = alpha * chebyshev_filter(op, x, p) + beta * chebyshev_filter(op, y, p)
    scale = (abs(alpha) * np.linalg.norm(chebyshev_filter(op, x, p))
             + abs(beta) * np.linalg.norm(chebyshev_filter(op, y, p)))
    assert np.linalg.norm(lhs - rhs) <= 1e-11 * max(scale, 1e-300)


@pytest.mark.parametrize("m", [1, 2, 7, 30])
def test_filter_costs_m_applications(m):
    c = TallyCounter()
    pencil = SparsePencil(sym(np.diag([1.0, 2.0, 3.0, 4.0]), "A"), sym(np.eye(4), "B"), c)
    chebyshev_filter(ShiftedOperator(pencil, 0.5), np.ones(4), FilterParams(m, 1.0, 3.6, 0.4))
    assert c.count == 2 * m
    assert c.by_label == {"A": m, "B": m}


def test_filter_is_not_normalized():
    z = chebyshev_filter(diag_op([0.0, 3.0]), np.array([5.0, 0.0]), FilterParams(4, 2.0, 4.0, 0.0))
    assert z[0] == pytest.approx(5.0, rel=1e-14)

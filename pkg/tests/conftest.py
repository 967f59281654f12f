import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import HealthCheck, settings

from chebrqi import SparseSymMatrix

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def sym(dense, label="M"):
    return SparseSymMatrix(sp.csr_matrix(np.asarray(dense, dtype=float)), label)


def random_spd(rng, n, density=0.3, shift=1.0):
    """Sparse SPD matrix with a guaranteed diagonal margin."""
    R = sp.random(n, n, density=density, random_state=rng, format="csr")
    S = R + R.T
    diag = np.abs(S).sum(axis=1).A1 + shift
    return SparseSymMatrix(S + sp.diags(diag), "M")


def random_sym(rng, n, density=0.3):
    R = sp.random(n, n, density=density, random_state=rng, format="csr")
    return SparseSymMatrix(R + R.T + sp.identity(n), "M")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

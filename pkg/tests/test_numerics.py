import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sos_lab.errors import DimensionMismatch, NotPsd, NumericalError
from sos_lab.numerics import (as_symmetric, eigendecompose, is_psd, min_eigenvalue, numerical_rank,
                              psd_square_root_rows)


def test_validation():
    with pytest.raises(DimensionMismatch):
        as_symmetric([[1, 2, 3]])
    with pytest.raises(DimensionMismatch):
        as_symmetric([[1, 2], [0, 1]])
    with pytest.raises(NumericalError):
        as_symmetric([[np.nan]])


def test_eigen_order():
    w, V = eigendecompose(np.diag([1.0, 3.0, 2.0]))
    assert list(w) == [3.0, 2.0, 1.0]
    assert np.allclose(np.abs(V[:, 0]), [0, 1, 0])


def test_rank_and_psd():
    assert numerical_rank(np.ones((4, 4))).rank == 1
    assert is_psd(np.ones((4, 4)))
    assert not is_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert min_eigenvalue(np.array([[1.0, 2.0], [2.0, 1.0]])) == pytest.approx(-1.0)


def test_square_root_rejects_indefinite():
    with pytest.raises(NotPsd):
        psd_square_root_rows(np.diag([1.0, -1.0]))


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000))
def test_square_root_reconstructs(n, r, seed):
    B = np.random.default_rng(seed).standard_normal((n, r))
    M = B @ B.T
    G = psd_square_root_rows(M)
    assert G.shape[0] == numerical_rank(M).rank == min(n, r)
    assert np.allclose(G.T @ G, M, atol=1e-9 * max(1, np.abs(M).max()))

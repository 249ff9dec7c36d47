import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randtt.exceptions import DegenerateInputError, NumericError
from randtt.linalg import adapt_range_finder, orthonormalize, svd_truncate_rank, svd_truncate_tol, tails


def low_rank(m, n, r, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def test_truncate_tol_diagonal():
    M = np.diag([3.0, 2.0, 1.0])
    res = svd_truncate_tol(M, np.sqrt(5))
    assert res.rank == 1
    assert res.tail == pytest.approx(np.sqrt(5), rel=1e-14)
    full = svd_truncate_tol(np.random.default_rng(0).standard_normal((4, 6)), 0.0)
    assert full.rank == 4 and full.tail == 0.0


def test_truncate_tol_recovers_rank():
    assert svd_truncate_tol(low_rank(12, 9, 2, 1), 1e-10).rank == 2


def test_truncate_rank():
    M = np.random.default_rng(2).standard_normal((5, 7))
    res = svd_truncate_rank(M, 5)
    assert res.tail <= 1e-10 * np.linalg.norm(M)
    np.testing.assert_allclose(res.Q @ res.projected, M, atol=1e-12)
    assert svd_truncate_rank(np.diag([3.0, 2.0, 1.0]), 2).tail == pytest.approx(1.0)
    for r in (0, 6):
        with pytest.raises(ValueError):
            svd_truncate_rank(M, r)


def test_non_finite_raises():
    M = np.ones((3, 3))
    M[1, 1] = np.nan
    with pytest.raises(NumericError):
        svd_truncate_tol(M, 0.1)
    with pytest.raises(NumericError):
        orthonormalize(M)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**31))
def test_eckart_young_and_tail_monotonicity(m, n, seed):
    M = np.random.default_rng(seed).standard_normal((m, n))
    s = np.linalg.svd(M, compute_uv=False)
    t = tails(s)
    assert np.all(np.diff(t) <= 1e-15)
    for r in range(1, min(m, n) + 1):
        res = svd_truncate_rank(M, r)
        residual = np.linalg.norm(M - res.Q @ (res.Q.T @ M))
        assert residual == pytest.approx(res.tail, rel=1e-9, abs=1e-12)
        assert res.tail == pytest.approx(np.sqrt(np.sum(s[r:] ** 2)), rel=1e-9, abs=1e-12)


def test_orthonormalize():
    rng = np.random.default_rng(3)
    Q0, _ = np.linalg.qr(rng.standard_normal((6, 3)))
    Q = orthonormalize(Q0)
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(Q @ (Q.T @ Q0), Q0, atol=1e-14)
    np.testing.assert_allclose(orthonormalize(np.array([0.0, 3.0, 4.0]))[:, 0], [0, 0.6, 0.8])
    with pytest.raises(DegenerateInputError):
        orthonormalize(np.column_stack([Q0[:, 0], 2 * Q0[:, 0]]))


def test_range_finder_exact_rank():
    A = low_rank(20, 20, 3, 4)
    res = adapt_range_finder(A, 1e-8 * np.linalg.norm(A), block=1, seed=1)
    assert res.Q.shape[1] == 3
    np.testing.assert_allclose(res.B, res.Q.T @ A, atol=1e-12)


def test_range_finder_loose_tolerance_single_block():
    A = np.random.default_rng(5).standard_normal((30, 40))
    res = adapt_range_finder(A, 1.01 * np.linalg.norm(A), block=4, seed=0)
    assert res.Q.shape[1] == 4


def test_range_finder_zero_matrix():
    res = adapt_range_finder(np.zeros((5, 7)), 1.0, block=3)
    assert res.Q.shape == (5, 1)
    assert res.estimate == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 25), st.integers(2, 25), st.integers(1, 6), st.integers(0, 2),
       st.sampled_from(["gaussian", "spemb", "sdct"]), st.integers(0, 2**31))
def test_range_finder_gram_identity(m, n, block, power, kind, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) * np.logspace(0, -6, n)[None, :]
    delta = 1e-2 * np.linalg.norm(A)
    res = adapt_range_finder(A, delta, block=block, power=power, kind=kind, seed=seed)
    Q = res.Q
    np.testing.assert_allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-10)
    direct = np.linalg.norm(A - Q @ (Q.T @ A)) ** 2
    assert abs(direct - res.estimate) <= 1e-10 * res.norm_sq
    if Q.shape[1] < min(m, n):
        assert res.estimate <= delta**2


def test_range_finder_bad_arguments():
    A = np.ones((3, 4))
    with pytest.raises(ValueError):
        adapt_range_finder(A, 0.0)
    with pytest.raises(ValueError):
        adapt_range_finder(A, 1.0, block=0)
    with pytest.raises(ValueError):
        adapt_range_finder(A, 1.0, factor_dims=(3,))

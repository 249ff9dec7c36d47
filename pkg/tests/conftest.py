import numpy as np
import pytest

from randtt import random_tt, tt_contract


def exact_rank_tensor(dims=(6, 7, 8, 9), ranks=(2, 3, 2), seed=0):
    """Tensor of exact TT-rank ``ranks`` contracted from Gaussian cores."""
    return tt_contract(random_tt(dims, ranks, seed=seed))


def stage_residuals(t, tt):
    """``||A_n - Q_n Q_n^T A_n||_F`` recomputed from the cores, one per stage."""
    out = []
    carry, r = t, 1
    for core in tt.cores[:-1]:
        M = carry.reshape(r * core.shape[1], -1, order="F")
        Q = core.reshape(-1, core.shape[2], order="F")
        P = Q.T @ M
        out.append(float(np.linalg.norm(M - Q @ P)))
        carry, r = P, core.shape[2]
    return out


@pytest.fixture
def exact232():
    return exact_rank_tensor()


@pytest.fixture
def small_random():
    return np.random.default_rng(42).standard_normal((5, 6, 4, 7))

"""Approximation quality metrics and the error-bound oracle for TT-SVD."""

import numpy as np

from .exceptions import ResourceLimitError
from .tensor import unfold_seq
from .tt import TTTensor, tt_contract

BOUND_ORACLE_MAX_ENTRIES = 10**6


def _dense(x):
    return tt_contract(x) if isinstance(x, TTTensor) else np.asarray(x, dtype=np.float64)


def relative_error(reference, approx):
    """``||reference - approx||_F / ||reference||_F``; ``approx`` may be a TTTensor."""
    a = np.asarray(reference, dtype=np.float64)
    b = _dense(approx)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    norm = np.linalg.norm(a.ravel(order="K"))
    if norm == 0:
        raise ValueError("relative error is undefined for a zero reference tensor")
    return float(np.linalg.norm((a - b).ravel(order="K")) / norm)


def fit(reference, approx):
    return 1.0 - relative_error(reference, approx)


def tt_svd_bound_oracle(t, ranks):
    """``sqrt(sum_n tail_{ranks[n]+1}(A_([n]))**2)`` from full SVDs of every unfolding.

    This is the a priori error bound for TT-SVD at the given ranks. Only meant
    for small tensors; refuses inputs above ``BOUND_ORACLE_MAX_ENTRIES``.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.size > BOUND_ORACLE_MAX_ENTRIES:
        raise ResourceLimitError(f"{t.size} entries exceed the oracle guard of {BOUND_ORACLE_MAX_ENTRIES}")
    if len(ranks) != t.ndim - 1:
        raise ValueError(f"need {t.ndim - 1} ranks, got {len(ranks)}")
    total = 0.0
    for n, r in enumerate(ranks, start=1):
        s = np.linalg.svd(unfold_seq(t, n), compute_uv=False)
        total += float(np.sum(s[r:] ** 2))
    return float(np.sqrt(total))

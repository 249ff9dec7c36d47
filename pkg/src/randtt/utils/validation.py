"""Input validation shared by the functional API and the estimators."""

import numbers

import numpy as np
from sklearn.utils import check_array

from ..exceptions import NumericError


def check_tensor(X, min_order=2):
    """Return ``X`` as a finite float64 array of order ``>= min_order``, Fortran-ordered."""
    X = check_array(
        X,
        dtype=np.float64,
        order="F",
        allow_nd=True,
        ensure_2d=min_order >= 2,
        ensure_all_finite=False,
        ensure_min_samples=1,
        ensure_min_features=1,
    )
    if X.ndim < min_order:
        raise ValueError(f"expected a tensor of order >= {min_order}, got order {X.ndim}")
    if not np.all(np.isfinite(X)):
        raise NumericError("input tensor has non-finite entries")
    return X


def check_eps(eps):
    if not isinstance(eps, numbers.Real) or not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    return float(eps)


def check_ranks(ranks, order):
    """Validate a TT-rank vector for a tensor of the given order."""
    if isinstance(ranks, numbers.Integral):
        ranks = [ranks] * (order - 1)
    ranks = tuple(ranks)
    if len(ranks) != order - 1:
        raise ValueError(f"a tensor of order {order} needs {order - 1} ranks, got {len(ranks)}")
    for r in ranks:
        if not isinstance(r, numbers.Integral) or r < 1:
            raise ValueError(f"ranks must be positive integers, got {ranks}")
    return tuple(int(r) for r in ranks)


def check_nonnegative_int(value, name, minimum=0):
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)

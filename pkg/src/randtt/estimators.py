"""Estimator wrappers with the scikit-learn ``fit``/``transform`` API.

``fit(X)`` decomposes a dense tensor. ``transform(X)`` projects a tensor of
the same shape onto the fitted left-orthonormal frames and returns a
:class:`~randtt.tt.TTTensor` whose last core is recomputed from ``X``; on the
training tensor it returns the fitted decomposition itself.
``inverse_transform`` contracts a TT back to a dense array and ``score``
reports the fit ``1 - RE``.

    >>> est = RandomizedTT(ranks=(2, 3, 2), random_state=0).fit(X)
    >>> est.ranks_
    (2, 3, 2)
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import decompose
from ._random import resolve_seed
from .metrics import fit as fit_metric
from .tt import TTTensor, tt_contract
from .utils.validation import check_tensor


class _TTDecomposition(TransformerMixin, BaseEstimator):
    def _decompose(self, X):
        raise NotImplementedError

    def fit(self, X, y=None):
        X = check_tensor(X)
        result = self._decompose(X)
        self.tt_ = result.tt
        self.ranks_ = result.ranks
        self.stage_norms_ = result.stage_norms
        self.clamped_ = result.clamped
        self.dims_ = X.shape
        E = result.estimate
        self.error_estimate_ = float(np.sqrt(E) / result.norm) if result.norm > 0 else 0.0
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).tt_

    def transform(self, X):
        check_is_fitted(self, "tt_")
        X = check_tensor(X)
        if X.shape != self.dims_:
            raise ValueError(f"X has shape {X.shape}, the decomposition was fitted on {self.dims_}")
        frames = self.tt_.cores[:-1]
        carry = X
        for core in frames:
            G = core.reshape(-1, core.shape[2], order="F")
            M = carry.reshape(G.shape[0], -1, order="F")
            carry = (M.T @ G).T
        r = frames[-1].shape[2]
        last = np.asarray(carry).reshape(r, X.shape[-1], 1, order="F")
        return TTTensor(list(frames) + [last])

    def inverse_transform(self, X):
        return tt_contract(X)

    def score(self, X, y=None):
        """FIT of the projected approximation, ``1 - ||X - B||_F / ||X||_F``."""
        return fit_metric(X, self.transform(X))


class TTSVD(_TTDecomposition):
    """Deterministic TT-SVD, either at relative accuracy ``eps`` or at fixed ``ranks``."""

    def __init__(self, eps=None, ranks=None):
        self.eps = eps
        self.ranks = ranks

    def _decompose(self, X):
        if (self.eps is None) == (self.ranks is None):
            raise ValueError("set exactly one of eps and ranks")
        if self.eps is not None:
            return decompose.tt_svd(X, self.eps)
        return decompose.tt_svd_fixed_rank(X, self.ranks)


class RandomizedTT(_TTDecomposition):
    """Sketch-based TT approximation with prescribed ranks.

    Parameters
    ----------
    ranks : int or sequence of int
        Target TT-ranks; an int is used for every bond.
    oversample : int, default=10
        Extra sketch columns beyond each rank.
    power : int, default=0
        Number of power iterations ``(A A^T)^power A Omega``.
    sketch : {"gaussian", "kr-gaussian", "kron-gaussian", "spemb", "sdct"}
    random_state : int or None
        Seed of the per-stage random streams.
    """

    def __init__(self, ranks, oversample=10, power=0, sketch="gaussian", random_state=None):
        self.ranks = ranks
        self.oversample = oversample
        self.power = power
        self.sketch = sketch
        self.random_state = random_state

    def _decompose(self, X):
        self.seed_ = resolve_seed(self.random_state)
        return decompose.rand_tt_fixed_rank(
            X, self.ranks, oversample=self.oversample, power=self.power,
            sketch=self.sketch, seed=self.seed_,
        )


class GramRandomizedTT(_TTDecomposition):
    """Prescribed-rank TT approximation from a powered Gaussian sketch of the short side."""

    def __init__(self, ranks, oversample=10, power=1, random_state=None):
        self.ranks = ranks
        self.oversample = oversample
        self.power = power
        self.random_state = random_state

    def _decompose(self, X):
        self.seed_ = resolve_seed(self.random_state)
        return decompose.rand_tt_fixed_rank_gram(
            X, self.ranks, oversample=self.oversample, power=self.power, seed=self.seed_,
        )


class AdaptiveRandomizedTT(_TTDecomposition):
    """Fixed-precision randomized TT approximation; ranks are discovered blockwise."""

    def __init__(self, eps=1e-2, block_size=10, power=0, sketch="gaussian", random_state=None):
        self.eps = eps
        self.block_size = block_size
        self.power = power
        self.sketch = sketch
        self.random_state = random_state

    def _decompose(self, X):
        self.seed_ = resolve_seed(self.random_state)
        return decompose.adaptive_rand_tt(
            X, self.eps, block=self.block_size, power=self.power,
            sketch=self.sketch, seed=self.seed_,
        )


class GreedyTTRank(BaseEstimator):
    """Greedy ``eps``-TT-rank estimator; ``fit`` sets ``ranks_`` only."""

    def __init__(self, eps=1e-2, convention=decompose.GREEDY_REPORTED):
        self.eps = eps
        self.convention = convention

    def fit(self, X, y=None):
        self.ranks_ = decompose.greedy_tt_rank(X, self.eps, convention=self.convention)
        return self

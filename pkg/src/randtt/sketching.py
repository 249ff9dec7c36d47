"""Random test matrices for range finding.

A sketch is a ``rows x cols`` matrix ``Omega`` applied from the right, ``A @ Omega``.
Five families are supported:

``gaussian``
    i.i.d. standard normal entries.
``kr-gaussian``
    Khatri-Rao product of small Gaussian factors, one per trailing mode.
``kron-gaussian``
    Kronecker product of small Gaussian factors, truncated to ``cols`` columns.
``spemb``
    CountSketch: each row holds a single random sign in a random column.
``sdct``
    ``sqrt(rows/cols) * D C S`` with random signs ``D``, the orthonormal DCT-II
    applied along rows and a uniform column sample ``S``.

Structured operators index their rows first-index-fastest over
``factor_dims``, i.e. the row of ``(i_1, ..., i_k)`` is
``i_1 + i_2*I_1 + ...``, matching a sequential unfolding of the trailing modes.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.sparse

from ._random import Stream

KINDS = ("gaussian", "kr-gaussian", "kron-gaussian", "spemb", "sdct")


@dataclass(frozen=True)
class SketchSpec:
    kind: str
    factor_dims: tuple
    cols: int
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sketch kind {self.kind!r}; expected one of {KINDS}")
        dims = tuple(int(d) for d in np.atleast_1d(self.factor_dims))
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor_dims must be positive, got {self.factor_dims}")
        object.__setattr__(self, "factor_dims", dims)
        if int(self.cols) < 1:
            raise ValueError(f"a sketch needs at least one column, got {self.cols}")
        object.__setattr__(self, "cols", int(self.cols))

    @property
    def rows(self):
        return int(np.prod(self.factor_dims))


class SketchOperator:
    rows: int
    cols: int

    def materialize(self):
        raise NotImplementedError

    def apply_right(self, A):
        """Return ``A @ Omega``."""
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[1] != self.rows:
            raise ValueError(f"cannot apply a {self.rows}x{self.cols} sketch to a matrix of shape {A.shape}")
        return self._apply(A)

    def _apply(self, A):
        return A @ self.materialize()


class GaussianSketch(SketchOperator):
    def __init__(self, matrix):
        self.matrix = matrix
        self.rows, self.cols = matrix.shape

    def materialize(self):
        return self.matrix


class KhatriRaoSketch(SketchOperator):
    """``Omega[:, c] = kron(F_k[:, c], ..., F_1[:, c])`` so that ``F_1`` indexes fastest."""

    def __init__(self, factors):
        self.factors = factors
        self.rows = int(np.prod([f.shape[0] for f in factors]))
        self.cols = factors[0].shape[1]

    def materialize(self):
        out = self.factors[0]
        for f in self.factors[1:]:
            out = (out[None, :, :] * f[:, None, :]).reshape(-1, self.cols)
        return out

    def _apply(self, A):
        dims = tuple(f.shape[0] for f in self.factors)
        return apply_kr_via_tenvecmult(A.reshape((A.shape[0],) + dims, order="F"), A.shape[0], self.factors)


class KroneckerSketch(SketchOperator):
    """First ``cols`` columns of ``kron(F_k, ..., F_1)``; every factor has ``L`` columns."""

    def __init__(self, factors, cols):
        self.factors = factors
        self.rows = int(np.prod([f.shape[0] for f in factors]))
        self.cols = cols

    def materialize(self):
        out = self.factors[0]
        for f in self.factors[1:]:
            out = np.kron(f, out)
        return out[:, : self.cols]

    def _apply(self, A):
        dims = tuple(f.shape[0] for f in self.factors)
        X = A.reshape((A.shape[0],) + dims, order="F")
        for axis, f in enumerate(self.factors, start=1):
            X = np.moveaxis(np.tensordot(X, f, axes=(axis, 0)), -1, axis)
        return X.reshape(A.shape[0], -1, order="F")[:, : self.cols]


class CountSketch(SketchOperator):
    def __init__(self, hashes, signs, cols):
        self.hashes = hashes
        self.signs = signs
        self.rows = len(hashes)
        self.cols = cols
        self._sparse = scipy.sparse.csr_matrix(
            (signs, (np.arange(self.rows), hashes)), shape=(self.rows, cols)
        )

    def materialize(self):
        return self._sparse.toarray()

    def _apply(self, A):
        return np.asarray((self._sparse.T @ A.T).T)


class DCTSketch(SketchOperator):
    def __init__(self, signs, selected):
        self.signs = signs
        self.selected = selected
        self.rows = len(signs)
        self.cols = len(selected)
        self.scale = np.sqrt(self.rows / self.cols)

    def materialize(self):
        # column j of the DCT matrix transpose is the transform of e_j
        C = scipy.fft.dct(np.eye(self.rows), type=2, norm="ortho", axis=0).T
        return self.scale * self.signs[:, None] * C[:, self.selected]

    def _apply(self, A):
        Y = scipy.fft.dct(A * self.signs[None, :], type=2, norm="ortho", axis=1)
        return self.scale * Y[:, self.selected]


def kron_factor_cols(cols, n_factors):
    """Smallest ``L`` with ``L ** n_factors >= cols``."""
    L = max(1, int(np.ceil(cols ** (1.0 / n_factors))))
    while L**n_factors < cols:
        L += 1
    while L > 1 and (L - 1) ** n_factors >= cols:
        L -= 1
    return L


def draw(spec, rng=None):
    """Realize the sketch described by ``spec``.

    Without ``rng`` a fresh stream keyed by ``(spec.seed, spec.stream_id)`` is
    used, so equal specs give bit-identical operators.
    """
    if rng is None:
        rng = Stream(spec.seed, spec.stream_id)
    rows, cols = spec.rows, spec.cols
    if spec.kind == "gaussian":
        return GaussianSketch(rng.normal((rows, cols)))
    if spec.kind == "kr-gaussian":
        return KhatriRaoSketch([rng.normal((d, cols)) for d in spec.factor_dims])
    if spec.kind == "kron-gaussian":
        L = kron_factor_cols(cols, len(spec.factor_dims))
        return KroneckerSketch([rng.normal((d, L)) for d in spec.factor_dims], cols)
    if spec.kind == "spemb":
        return CountSketch(rng.integers(cols, rows), rng.signs(rows), cols)
    # sdct
    if cols > rows:
        raise ValueError(f"sdct cannot sample {cols} of {rows} columns without replacement")
    return DCTSketch(rng.signs(rows), np.sort(rng.sample(rows, cols)))


def apply_kr_via_tenvecmult(t, front_rows, factors):
    """``A @ KR(factors)`` computed one trailing mode at a time.

    ``t`` holds ``A`` reshaped to ``(front_rows, I_1, ..., I_k)`` and
    ``factors[j]`` has shape ``(I_{j+1}, cols)``. Column ``c`` of the result is
    ``t`` contracted with ``factors[j][:, c]`` along every trailing mode; the
    Khatri-Rao matrix itself is never formed.
    """
    t = np.asarray(t)
    dims = tuple(f.shape[0] for f in factors)
    if t.size != front_rows * int(np.prod(dims)):
        raise ValueError(f"tensor of shape {t.shape} does not match front_rows={front_rows} and factor dims {dims}")
    cols = factors[0].shape[1]
    if any(f.shape[1] != cols for f in factors):
        raise ValueError("all factors must have the same number of columns")
    # last mode first: one GEMM, then batched vector contractions
    X = t.reshape(-1, dims[-1], order="F") @ factors[-1]
    for f in reversed(factors[:-1]):
        X = X.reshape(-1, f.shape[0], cols, order="F")
        X = np.einsum("aic,ic->ac", X, f)
    return X.reshape(front_rows, cols, order="F")

"""Matrix kernels: SVD truncation, orthonormalization and an adaptive range finder."""

from dataclasses import dataclass

import numpy as np

from ._random import Stream
from .exceptions import DegenerateInputError, NumericError
from .sketching import SketchSpec, draw

EPS = np.finfo(np.float64).eps


@dataclass
class TruncationResult:
    """Leading left singular factor of a matrix.

    ``tail`` is the Frobenius norm of the discarded part,
    ``sqrt(sum_{k > rank} sigma_k**2)``; ``projected`` is ``diag(sigma) @ Vt``
    for the retained triplets.
    """

    Q: np.ndarray
    rank: int
    sigma: np.ndarray
    tail: float
    projected: np.ndarray = None


def _check_finite(M):
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix has non-finite entries")


def tails(sigma):
    """``out[k] = sqrt(sum_{i >= k} sigma_i**2)``, with a trailing zero (0-based)."""
    sq = np.asarray(sigma, dtype=np.float64) ** 2
    suffix = np.cumsum(sq[::-1])[::-1]
    return np.sqrt(np.append(suffix, 0.0))


def _svd(M):
    _check_finite(M)
    try:
        return np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed to converge on a {M.shape} matrix") from exc


def _truncate(U, s, Vt, r, with_projection):
    t = tails(s)
    proj = None
    if with_projection:
        proj = Vt[:r]
        proj *= s[:r, None]
    return TruncationResult(Q=U[:, :r], rank=r, sigma=s[:r], tail=float(t[r]), projected=proj)


def svd_truncate_tol(M, delta, with_projection=True):
    """Smallest rank ``r >= 1`` whose discarded tail is at most ``delta``."""
    if delta < 0:
        raise ValueError(f"tolerance must be nonnegative, got {delta}")
    M = np.asarray(M, dtype=np.float64)
    U, s, Vt = _svd(M)
    t = tails(s)
    # t[r] is the tail after keeping r values; t is nonincreasing
    r = int(np.argmax(t <= delta))
    r = max(r, 1)
    return _truncate(U, s, Vt, r, with_projection)


def svd_truncate_rank(M, r, with_projection=True):
    """Best rank-``r`` left factor of ``M`` in the Frobenius norm."""
    M = np.asarray(M, dtype=np.float64)
    if not 1 <= r <= min(M.shape):
        raise ValueError(f"rank must satisfy 1 <= r <= {min(M.shape)}, got {r}")
    U, s, Vt = _svd(M)
    return _truncate(U, s, Vt, int(r), with_projection)


def orthonormalize(M, rtol=None):
    """Orthonormal basis of the column span of a full-column-rank ``M`` (thin QR)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    _check_finite(M)
    if M.shape[1] > M.shape[0]:
        raise DegenerateInputError(f"{M.shape[1]} columns cannot be independent in dimension {M.shape[0]}")
    Q, R = np.linalg.qr(M)
    d = np.abs(np.diag(R))
    if rtol is None:
        rtol = max(M.shape) * EPS
    scale = np.linalg.norm(M, 2) if M.size else 0.0
    if scale == 0.0 or d.min() <= rtol * scale:
        raise DegenerateInputError("matrix is numerically rank deficient")
    # fix signs so that diag(R) > 0 and the basis is unique
    return Q * np.sign(np.diag(R))[None, :]


def _independent_directions(Y, atol):
    """Orthonormal basis for the part of ``Y``'s range with singular values above ``atol``."""
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    return U[:, s > atol]


@dataclass
class RangeFinderResult:
    Q: np.ndarray
    B: np.ndarray
    norm_sq: float
    estimate: float


def adapt_range_finder(A, delta, block=10, power=0, kind="gaussian", factor_dims=None,
                       seed=0, stream_id=0, rng=None, debug=False):
    """Blocked adaptive range finder with a Gram-identity error tracker.

    Grows an orthonormal ``Q`` ``block`` columns at a time until the tracked
    residual ``E = ||A||_F^2 - ||Q^T A||_F^2`` drops to ``delta**2``. Each block
    is ``(A A^T)^power A Omega`` for a fresh sketch ``Omega``, deflated against
    the current basis and re-orthogonalized once. Numerically null directions
    of a block are dropped, so an exactly rank-``k`` matrix yields ``k``
    columns. Stops early once a block adds nothing (range exhausted) or the
    column count reaches ``min(A.shape)``.

    Returns a :class:`RangeFinderResult` with ``Q``, ``B = Q^T A``,
    ``||A||_F^2`` and the final estimate ``E``.
    """
    A = np.asarray(A, dtype=np.float64)
    if delta <= 0:
        raise ValueError(f"tolerance must be positive, got {delta}")
    if block < 1:
        raise ValueError(f"block size must be >= 1, got {block}")
    if power < 0:
        raise ValueError(f"power must be >= 0, got {power}")
    _check_finite(A)
    m, n = A.shape
    if factor_dims is None:
        factor_dims = (n,)
    if int(np.prod(factor_dims)) != n:
        raise ValueError(f"factor_dims {factor_dims} do not multiply to {n} columns")
    if rng is None:
        rng = Stream(seed, stream_id)
    cap = min(m, n)
    rtol = 10 * max(m, n) * EPS

    a = A.ravel(order="K")
    norm_sq = float(a @ a)
    E = norm_sq
    Q = np.empty((m, 0))
    B = np.empty((0, n))
    while True:
        b = min(block, cap - Q.shape[1])
        if kind == "sdct":
            b = min(b, n)
        op = draw(SketchSpec(kind, factor_dims, b), rng)
        Y = op.apply_right(A)
        for _ in range(power):
            Y = Y - Q @ (Q.T @ Y)
            Y = A @ (A.T @ Y)
        scale = np.linalg.norm(Y)
        Y = Y - Q @ (Q.T @ Y)
        Y = Y - Q @ (Q.T @ Y)
        if not np.all(np.isfinite(Y)):
            raise NumericError("non-finite values in range finder block")
        Qb = _independent_directions(Y, rtol * scale)
        if Qb.shape[1] == 0:
            break
        Qb = Qb - Q @ (Q.T @ Qb)
        Qb, _ = np.linalg.qr(Qb)
        Bb = Qb.T @ A
        Q = np.hstack([Q, Qb])
        B = np.vstack([B, Bb])
        E -= float(np.sum(Bb * Bb))
        if debug:
            direct = float(np.linalg.norm(A - Q @ B) ** 2)
            assert abs(direct - E) <= 1e-8 * norm_sq + 1e-8 * direct, (direct, E)
        if E <= delta**2 or Q.shape[1] >= cap:
            break
    if Q.shape[1] == 0:
        # zero matrix: any unit vector is an exact basis
        Q = np.zeros((m, 1))
        Q[0, 0] = 1.0
        B = Q.T @ A
    return RangeFinderResult(Q=Q, B=B, norm_sq=norm_sq, estimate=max(E, 0.0))

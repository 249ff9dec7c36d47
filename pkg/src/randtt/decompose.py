"""TT decomposition algorithms.

All algorithms share one sweep: for ``n = 1..N-1`` the carry is reshaped to
``A_n`` of shape ``(r_{n-1} I_n) x (I_{n+1} ... I_N)``, an orthonormal ``Q_n``
is chosen for its column space, ``Q_n`` becomes core ``n`` and the sweep
continues with ``Q_n^T A_n``. The final carry is the last core. They differ
only in how ``Q_n`` is found:

* :func:`tt_svd` and :func:`tt_svd_fixed_rank` use a truncated SVD,
* :func:`rand_tt_fixed_rank` sketches the column space with ``A_n Omega_n``
  (optionally with power iterations),
* :func:`rand_tt_fixed_rank_gram` powers a short Gaussian sketch
  ``(A_n A_n^T)^q Omega_n``,
* :func:`adaptive_rand_tt` grows ``Q_n`` blockwise until a tolerance is met.

Because every ``Q_n`` is orthonormal, the squared error of the result equals
the sum over stages of ``||A_n||_F^2 - ||Q_n^T A_n||_F^2``; each result keeps
those stage norms so the error can be estimated without reconstruction.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericError
from .linalg import EPS, adapt_range_finder, svd_truncate_rank, svd_truncate_tol
from .sketching import KINDS, SketchSpec, draw
from .tt import TTTensor
from .utils.validation import check_eps, check_nonnegative_int, check_ranks, check_tensor

# Greedy rank selection conventions, see greedy_tt_rank.
GREEDY_REPORTED = "reported"
GREEDY_PRINTED = "printed"


@dataclass
class TTResult:
    """Output of a decomposition.

    ``stage_norms[n]`` is ``(||A_n||_F^2, ||Q_n^T A_n||_F^2)`` and ``clamped[n]``
    records whether the requested rank or sketch width of stage ``n`` had to be
    reduced to fit the unfolding.
    """

    tt: TTTensor
    stage_norms: list
    clamped: tuple = field(default_factory=tuple)

    @property
    def ranks(self):
        return self.tt.ranks

    @property
    def norm(self):
        return float(np.sqrt(self.stage_norms[0][0]))

    @property
    def estimate(self):
        """Squared-error estimate from the stage norms."""
        return error_estimate_gram(self.stage_norms)[0]


def _delta(t, eps):
    return eps / np.sqrt(t.ndim - 1) * np.sqrt(_sq_norm(t))


def _sq_norm(X):
    x = X.ravel(order="K")
    return float(x @ x)


def _stage_matrix(carry, rows):
    return carry.reshape(rows, -1, order="F")


def _project(Q, M):
    # (M^T Q)^T is Fortran-ordered, so the next reshape is free
    return (M.T @ Q).T


def _finish(cores, carry, r, dims, norms, clamped=()):
    cores.append(carry.reshape(r, dims[-1], 1, order="F"))
    return TTResult(TTTensor(cores), norms, tuple(clamped))


def _sweep(t, choose):
    """Run the common stage loop; ``choose(n, M)`` returns ``(Q, carry, clamped)``."""
    dims = t.shape
    cores, norms, clamped = [], [], []
    carry, r = t, 1
    for n in range(t.ndim - 1):
        M = _stage_matrix(carry, r * dims[n])
        try:
            Q, carry, was_clamped = choose(n, M)
        except NumericError as exc:
            raise NumericError(f"stage {n + 1}: {exc}") from exc
        norms.append((_sq_norm(M), _sq_norm(carry)))
        clamped.append(was_clamped)
        cores.append(Q.reshape(r, dims[n], Q.shape[1], order="F"))
        r = Q.shape[1]
    return _finish(cores, carry, r, dims, norms, clamped)


def tt_svd(t, eps):
    """TT-SVD at relative accuracy ``eps``.

    Each stage keeps the fewest singular triplets whose discarded tail is at
    most ``eps * ||t||_F / sqrt(N - 1)``, which guarantees
    ``||t - result||_F <= eps * ||t||_F``.
    """
    t = check_tensor(t)
    eps = check_eps(eps)
    delta = _delta(t, eps)

    def choose(n, M):
        tr = svd_truncate_tol(M, delta)
        return tr.Q, tr.projected, False

    return _sweep(t, choose)


def tt_svd_fixed_rank(t, ranks):
    """TT-SVD truncating stage ``n`` to ``min(ranks[n], min(A_n.shape))``."""
    t = check_tensor(t)
    ranks = check_ranks(ranks, t.ndim)

    def choose(n, M):
        r = min(ranks[n], min(M.shape))
        tr = svd_truncate_rank(M, r)
        return tr.Q, tr.projected, r < ranks[n]

    return _sweep(t, choose)


def _check_fixed_rank_args(t, ranks, oversample, power, sketch):
    t = check_tensor(t)
    ranks = check_ranks(ranks, t.ndim)
    oversample = check_nonnegative_int(oversample, "oversample")
    power = check_nonnegative_int(power, "power")
    if sketch not in KINDS:
        raise ValueError(f"unknown sketch kind {sketch!r}; expected one of {KINDS}")
    return t, ranks, oversample, power


def _widths(requested, oversample, M):
    cap = min(M.shape)
    mu = min(requested, cap)
    ell = min(mu + oversample, cap)
    return mu, ell, mu + oversample > cap


def rand_tt_fixed_rank(t, ranks, oversample=10, power=0, sketch="gaussian", seed=0):
    """Randomized TT approximation with prescribed ranks.

    Stage ``n`` forms ``Z_n = (A_n A_n^T)^power A_n Omega_n`` with
    ``ranks[n] + oversample`` sketch columns over the trailing modes and keeps
    the leading ``ranks[n]`` left singular vectors of ``Z_n``. The product is
    evaluated right to left, never forming ``A_n A_n^T``. Stage ``n`` draws its
    sketch from stream ``n`` of ``seed``.

    When ``ranks[n] + oversample`` exceeds ``min(A_n.shape)`` the sketch width
    (and, if needed, the rank) is clamped and the stage is flagged in
    ``result.clamped``.
    """
    t, ranks, oversample, power = _check_fixed_rank_args(t, ranks, oversample, power, sketch)
    dims = t.shape

    def choose(n, M):
        mu, ell, clamped = _widths(ranks[n], oversample, M)
        op = draw(SketchSpec(sketch, dims[n + 1:], ell, seed=seed, stream_id=n + 1))
        Z = op.apply_right(M)
        for _ in range(power):
            Z = M @ (M.T @ Z)
        Q = svd_truncate_rank(Z, mu, with_projection=False).Q
        return Q, _project(Q, M), clamped

    return _sweep(t, choose)


def rand_tt_fixed_rank_gram(t, ranks, oversample=10, power=1, seed=0):
    """Randomized TT approximation sketching the short side of each unfolding.

    Stage ``n`` draws a Gaussian ``Omega_n`` with ``r_{n-1} I_n`` rows and
    forms ``(A_n A_n^T)^power Omega_n`` with ``2 * power`` multiplications;
    ``power`` must be at least 1.
    """
    t, ranks, oversample, power = _check_fixed_rank_args(t, ranks, oversample, power, "gaussian")
    if power < 1:
        raise ValueError("the Gram-sketch algorithm requires power >= 1")

    def choose(n, M):
        mu, ell, clamped = _widths(ranks[n], oversample, M)
        Z = draw(SketchSpec("gaussian", (M.shape[0],), ell, seed=seed, stream_id=n + 1)).materialize()
        for _ in range(power):
            Z = M @ (M.T @ Z)
        Q = svd_truncate_rank(Z, mu, with_projection=False).Q
        return Q, _project(Q, M), clamped

    return _sweep(t, choose)


def adaptive_rand_tt(t, eps, block=10, power=0, sketch="gaussian", seed=0):
    """Fixed-precision randomized TT approximation.

    Each stage runs :func:`~randtt.linalg.adapt_range_finder` with tolerance
    ``eps * ||t||_F / sqrt(N - 1)``; the rank is the number of columns it
    returns. The carry is ``Q_n^T A_n``, which the range finder already holds.
    """
    t = check_tensor(t)
    eps = check_eps(eps)
    block = check_nonnegative_int(block, "block", minimum=1)
    power = check_nonnegative_int(power, "power")
    if sketch not in KINDS:
        raise ValueError(f"unknown sketch kind {sketch!r}; expected one of {KINDS}")
    delta = _delta(t, eps)
    dims = t.shape

    def choose(n, M):
        res = adapt_range_finder(
            M, delta, block=block, power=power, kind=sketch,
            factor_dims=dims[n + 1:], seed=seed, stream_id=n + 1,
        )
        return res.Q, np.asfortranarray(res.B), False

    return _sweep(t, choose)


def sequential_singular_values(t):
    """Singular values of every sequential unfolding, largest first.

    Computed from the eigenvalues of the smaller Gram matrix, so values below
    roughly ``1e-8 * sigma_max`` carry absolute error of that order.
    """
    t = check_tensor(t)
    out = []
    for n in range(1, t.ndim):
        M = _stage_matrix(t, int(np.prod(t.shape[:n])))
        G = M @ M.T if M.shape[0] <= M.shape[1] else M.T @ M
        w = np.linalg.eigvalsh(G)[::-1]
        out.append(np.sqrt(np.clip(w, 0.0, None)))
    return out


def greedy_tt_rank(t, eps, convention=GREEDY_REPORTED, singular_values=None):
    """Greedy estimate of an ``eps``-TT-rank from the sequential unfoldings.

    Starting from all ranks 1, repeatedly increments the rank of the unfolding
    whose next singular value is largest (ties go to the lowest mode) until the
    sum of the discarded squared singular values over all unfoldings falls
    below ``delta**2 = eps**2 ||t||_F**2 / (N - 1)``.

    ``convention`` selects the index bookkeeping. ``"reported"`` counts
    ``sigma_{mu_n}`` itself as discarded and ranks by ``sigma_{mu_j + 1}``;
    this reproduces the published rank tables. ``"printed"`` sums the tail from
    ``sigma_{mu_n + 1}`` and ranks by ``sigma_{mu_j}``. Both give ranks at least
    as large as TT-SVD's.

    ``singular_values`` may carry the output of
    :func:`sequential_singular_values` to reuse it across tolerances.
    """
    t = check_tensor(t)
    eps = check_eps(eps)
    if convention not in (GREEDY_REPORTED, GREEDY_PRINTED):
        raise ValueError(f"unknown convention {convention!r}")
    S = singular_values if singular_values is not None else sequential_singular_values(t)
    delta_sq = _delta(t, eps) ** 2
    shift = 1 if convention == GREEDY_REPORTED else 0
    sq = [s**2 for s in S]
    mu = [1] * (t.ndim - 1)

    def discarded():
        return sum(float(np.sum(s[m - shift:])) for s, m in zip(sq, mu))

    while discarded() >= delta_sq:
        best, j0 = -1.0, None
        for j, (s, m) in enumerate(zip(S, mu)):
            if m >= len(s):
                continue
            k = m - 1 + shift
            value = s[k] if k < len(s) else 0.0
            if value > best:
                best, j0 = value, j
        if j0 is None:
            break
        mu[j0] += 1
    return tuple(mu)


def error_estimate_gram(stage_norms, rel_accuracy=1e-6):
    """Squared-error estimate ``E`` and whether rounding can be trusted.

    ``E`` is the sum of ``||A_n||^2 - ||Q_n^T A_n||^2`` (each clamped at zero).
    Each difference carries rounding error up to ``4 eps_mach ||A||^2`` over
    all stages, so ``E`` is accurate to relative ``rel_accuracy`` only when
    ``sqrt(E) >= sqrt(4 (N-1) eps_mach / rel_accuracy) * ||A||_F``; the flag
    reports that condition.
    """
    stage_norms = list(stage_norms)
    if not stage_norms:
        return 0.0, False
    E = float(sum(max(a - b, 0.0) for a, b in stage_norms))
    norm_a = np.sqrt(stage_norms[0][0])
    floor = np.sqrt(4 * len(stage_norms) * EPS / rel_accuracy) * norm_a
    return E, bool(np.sqrt(E) >= floor)

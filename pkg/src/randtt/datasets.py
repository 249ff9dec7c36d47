"""Synthetic test tensors.

``tt-noise`` and ``tt-snr`` perturb a random TT tensor with Gaussian noise;
``func-sin`` and ``func-hilbert`` sample smooth 5-variate functions on a grid.
All generators return Fortran-ordered arrays and are pure functions of their
arguments.
"""

from dataclasses import dataclass

import numpy as np

from ._random import Stream
from .tt import TTTensor, tt_contract
from .utils.validation import check_ranks

FAMILIES = ("tt-noise", "tt-snr", "func-sin", "func-hilbert")


def random_tt(dims, core_ranks, seed=0):
    """TT tensor with i.i.d. standard normal cores; core ``n`` uses stream ``n``."""
    dims = tuple(int(d) for d in dims)
    ranks = (1,) + check_ranks(core_ranks, len(dims)) + (1,)
    cores = [
        Stream(seed, n + 1).normal((ranks[n], dims[n], ranks[n + 1]))
        for n in range(len(dims))
    ]
    return TTTensor(cores)


def _signal_and_noise(dims, core_ranks, seed):
    P = tt_contract(random_tt(dims, core_ranks, seed))
    noise = Stream(seed, len(dims) + 1).normal(tuple(dims))
    return P, noise


def gen_tt_noise(dims, core_ranks, gamma, seed=0):
    """``P + gamma ||P||_F / sqrt(prod(dims)) * N`` with ``P`` a random TT tensor."""
    P, noise = _signal_and_noise(dims, core_ranks, seed)
    if gamma == 0:
        return P
    scale = gamma * np.linalg.norm(P.ravel(order="F")) / np.sqrt(P.size)
    P += scale * noise
    return P


def gen_tt_snr(dims, core_ranks, snr_db, seed=0):
    """``P + beta N`` with ``beta`` set so that ``10 log10(||P||^2 / ||beta N||^2) = snr_db``."""
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    P, noise = _signal_and_noise(dims, core_ranks, seed)
    beta = np.linalg.norm(P.ravel(order="F")) / (np.linalg.norm(noise.ravel(order="F")) * 10 ** (snr_db / 20))
    P += beta * noise
    return P


def _grid_sum(values, order):
    out = values
    for _ in range(order - 1):
        out = np.add.outer(out, values)
    # symmetric in its indices, so the transpose is the same tensor, Fortran-ordered
    return out.T


def gen_func_sin(I, order=5):
    """``sin(sqrt(sum_k ((i_k - 1) / (I - 1))**2))`` for ``i_k = 1..I``."""
    if I < 2:
        raise ValueError(f"grid extent must be >= 2, got {I}")
    x = (np.arange(I, dtype=np.float64) / (I - 1)) ** 2
    S = _grid_sum(x, order)
    np.sqrt(S, out=S)
    np.sin(S, out=S)
    return S


def gen_func_hilbert(I, order=5):
    """``(I - 1) / (I + i_1 + ... + i_5)`` for ``i_k = 1..I``."""
    if I < 2:
        raise ValueError(f"grid extent must be >= 2, got {I}")
    S = _grid_sum(np.arange(1, I + 1, dtype=np.float64), order)
    S += I
    np.divide(I - 1, S, out=S)
    return S


@dataclass
class GenSpec:
    family: str
    dims: tuple = None
    core_ranks: tuple = None
    gamma: float = None
    snr_db: float = None
    extent: int = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family.startswith("tt-"):
            if not self.dims or self.core_ranks is None:
                raise ValueError(f"{self.family} needs dims and core_ranks")
            if any(int(d) < 1 for d in self.dims):
                raise ValueError(f"dims must be positive, got {self.dims}")
            check_ranks(tuple(self.core_ranks), len(self.dims))
            if self.family == "tt-noise" and self.gamma is None:
                raise ValueError("tt-noise needs gamma")
            if self.family == "tt-snr" and self.snr_db is None:
                raise ValueError("tt-snr needs snr_db")
        elif self.extent is None:
            raise ValueError(f"{self.family} needs an extent")

    def generate(self):
        if self.family == "tt-noise":
            return gen_tt_noise(self.dims, self.core_ranks, self.gamma, self.seed)
        if self.family == "tt-snr":
            return gen_tt_snr(self.dims, self.core_ranks, self.snr_db, self.seed)
        if self.family == "func-sin":
            return gen_func_sin(self.extent)
        return gen_func_hilbert(self.extent)

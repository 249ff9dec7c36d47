"""Randomized and deterministic tensor-train approximations of dense tensors."""

from .datasets import GenSpec, gen_func_hilbert, gen_func_sin, gen_tt_noise, gen_tt_snr, random_tt
from .decompose import (
    TTResult,
    adaptive_rand_tt,
    error_estimate_gram,
    greedy_tt_rank,
    rand_tt_fixed_rank,
    rand_tt_fixed_rank_gram,
    sequential_singular_values,
    tt_svd,
    tt_svd_fixed_rank,
)
from .estimators import AdaptiveRandomizedTT, GramRandomizedTT, GreedyTTRank, RandomizedTT, TTSVD
from .metrics import fit, relative_error, tt_svd_bound_oracle
from .tt import TTTensor, left_ortho_defect, read_tt, tt_contract, tt_entry, write_tt

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRandomizedTT",
    "GenSpec",
    "GramRandomizedTT",
    "GreedyTTRank",
    "RandomizedTT",
    "TTResult",
    "TTSVD",
    "TTTensor",
    "adaptive_rand_tt",
    "error_estimate_gram",
    "fit",
    "gen_func_hilbert",
    "gen_func_sin",
    "gen_tt_noise",
    "gen_tt_snr",
    "greedy_tt_rank",
    "left_ortho_defect",
    "rand_tt_fixed_rank",
    "rand_tt_fixed_rank_gram",
    "random_tt",
    "read_tt",
    "relative_error",
    "sequential_singular_values",
    "tt_contract",
    "tt_entry",
    "tt_svd",
    "tt_svd_bound_oracle",
    "tt_svd_fixed_rank",
    "write_tt",
]

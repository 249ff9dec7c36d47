"""Tensor-train representation, contraction and the TTC1 file format."""

import struct

import numpy as np

from .exceptions import FormatError, InvalidStructureError

TTC_MAGIC = b"TTC1"


class TTTensor:
    """A tensor train: cores ``G_n`` of shape ``(r_{n-1}, I_n, r_n)`` with ``r_0 = r_N = 1``.

    First and last cores keep their singleton boundary extent so that every
    core is order 3.
    """

    def __init__(self, cores):
        cores = [np.asarray(c, dtype=np.float64) for c in cores]
        _check_cores(cores)
        self.cores = cores

    @property
    def dims(self):
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self):
        return tuple(c.shape[2] for c in self.cores[:-1])

    @property
    def order(self):
        return len(self.cores)

    @property
    def n_params(self):
        return sum(c.size for c in self.cores)

    def full(self):
        return tt_contract(self)

    def __getitem__(self, index):
        return tt_entry(self, index)

    def __repr__(self):
        return f"TTTensor(dims={self.dims}, ranks={self.ranks})"


def _check_cores(cores):
    if len(cores) < 1:
        raise InvalidStructureError("a TT tensor needs at least one core")
    for k, c in enumerate(cores):
        if c.ndim != 3:
            raise InvalidStructureError(f"core {k + 1} has order {c.ndim}, expected 3")
        if min(c.shape) < 1:
            raise InvalidStructureError(f"core {k + 1} has an empty extent {c.shape}")
    if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
        raise InvalidStructureError("boundary ranks must be 1")
    for k in range(len(cores) - 1):
        if cores[k].shape[2] != cores[k + 1].shape[0]:
            raise InvalidStructureError(
                f"rank mismatch between cores {k + 1} and {k + 2}: "
                f"{cores[k].shape[2]} != {cores[k + 1].shape[0]}"
            )


def tt_contract(tt):
    """Contract a TT back to a dense Fortran-ordered array.

    Evaluated left to right, carrying an ``(I_1...I_n) x r_n`` matrix.
    """
    if not isinstance(tt, TTTensor):
        tt = TTTensor(tt)
    cores = tt.cores
    left = cores[0].reshape(cores[0].shape[1], cores[0].shape[2], order="F")
    for core in cores[1:]:
        r0, I, r1 = core.shape
        # (P, r0) @ (r0, I*r1) -> (P, I, r1) with P fastest
        left = (left @ core.reshape(r0, I * r1, order="F")).reshape(-1, r1, order="F")
    return left.reshape(tt.dims, order="F")


def tt_entry(tt, index):
    """A single entry as a product of core slices; ``index`` is 0-based."""
    index = tuple(int(i) for i in index)
    if len(index) != tt.order:
        raise ValueError(f"index has {len(index)} components, tensor has order {tt.order}")
    for k, (i, d) in enumerate(zip(index, tt.dims)):
        if not 0 <= i < d:
            raise ValueError(f"index {i} out of range for mode {k + 1} with extent {d}")
    v = np.ones(1)
    for core, i in zip(tt.cores, index):
        v = v @ core[:, i, :]
    return float(v[0])


def left_ortho_defect(tt, n):
    """``||G^T G - I||_F`` for core ``n`` (1-based) reshaped to ``(r_{n-1} I_n) x r_n``."""
    if not 1 <= n <= tt.order - 1:
        raise ValueError(f"core index must satisfy 1 <= n <= {tt.order - 1}, got {n}")
    core = tt.cores[n - 1]
    G = core.reshape(-1, core.shape[2], order="F")
    return float(np.linalg.norm(G.T @ G - np.eye(G.shape[1])))


def write_tt(tt, path):
    """Write ``tt`` in the TTC1 format (little-endian, cores first-index-fastest)."""
    with open(path, "wb") as fh:
        fh.write(TTC_MAGIC)
        fh.write(struct.pack("<Q", tt.order))
        fh.write(struct.pack(f"<{tt.order}Q", *tt.dims))
        fh.write(struct.pack(f"<{tt.order - 1}Q", *tt.ranks))
        for core in tt.cores:
            fh.write(core.ravel(order="F").astype("<f8", copy=False).tobytes())


def read_tt(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != TTC_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}")
    try:
        (N,) = struct.unpack_from("<Q", raw, 4)
        dims = struct.unpack_from(f"<{N}Q", raw, 12)
        ranks = struct.unpack_from(f"<{N - 1}Q", raw, 12 + 8 * N)
    except struct.error as exc:
        raise FormatError(f"{path}: truncated header") from exc
    if N < 1:
        raise FormatError(f"{path}: order must be positive")
    offset = 12 + 8 * N + 8 * (N - 1)
    full_ranks = (1,) + tuple(ranks) + (1,)
    shapes = [(full_ranks[k], dims[k], full_ranks[k + 1]) for k in range(N)]
    total = sum(int(np.prod(s)) for s in shapes)
    if len(raw) != offset + 8 * total:
        raise FormatError(f"{path}: expected {total} doubles after the header")
    cores = []
    for shape in shapes:
        size = int(np.prod(shape))
        data = np.frombuffer(raw, dtype="<f8", count=size, offset=offset)
        cores.append(data.astype(np.float64).reshape(shape, order="F"))
        offset += 8 * size
    return TTTensor(cores)

"""Dense tensor algebra on numpy arrays.

Tensors are plain ``numpy.ndarray`` objects. Every reshape in this package uses
the first-index-fastest (Fortran) linearization, so the entry
``t[i1, ..., iN]`` lives at offset ``i1 + i2*I1 + i3*I1*I2 + ...`` of
``t.ravel(order="F")``. With that convention the sequential unfolding is a
pure reshape and costs nothing for Fortran-contiguous input.
"""

import struct

import numpy as np

from .exceptions import FormatError

DNT_MAGIC = b"DNT1"


def reshape(t, new_dims):
    """Relabel ``t`` with ``new_dims`` keeping the first-index-fastest data order."""
    t = np.asarray(t)
    new_dims = tuple(int(d) for d in new_dims)
    if any(d < 1 for d in new_dims):
        raise ValueError(f"extents must be positive, got {new_dims}")
    if int(np.prod(new_dims)) != t.size:
        raise ValueError(f"cannot reshape {t.shape} (size {t.size}) to {new_dims}")
    return t.reshape(new_dims, order="F")


def unfold_seq(t, n):
    """Sequential unfolding A_([n]): modes 1..n as rows, n+1..N as columns.

    ``n`` is 1-based and must satisfy ``1 <= n <= N-1``.
    """
    t = np.asarray(t)
    N = t.ndim
    if not 1 <= n <= N - 1:
        raise ValueError(f"sequential unfolding needs 1 <= n <= {N - 1}, got {n}")
    rows = int(np.prod(t.shape[:n]))
    return t.reshape((rows, -1), order="F")


def unfold_mode(t, n):
    """Mode-n unfolding A_(n) (1-based ``n``), remaining modes first-index-fastest."""
    t = np.asarray(t)
    N = t.ndim
    if not 1 <= n <= N:
        raise ValueError(f"mode must satisfy 1 <= n <= {N}, got {n}")
    moved = np.moveaxis(t, n - 1, 0)
    return moved.reshape((t.shape[n - 1], -1), order="F")


def fold_mode(M, n, dims):
    """Inverse of :func:`unfold_mode`."""
    dims = tuple(int(d) for d in dims)
    N = len(dims)
    if not 1 <= n <= N:
        raise ValueError(f"mode must satisfy 1 <= n <= {N}, got {n}")
    M = np.asarray(M)
    rest = dims[: n - 1] + dims[n:]
    if M.shape != (dims[n - 1], int(np.prod(rest))):
        raise ValueError(f"matrix of shape {M.shape} does not unfold dims {dims} in mode {n}")
    return np.moveaxis(M.reshape((dims[n - 1],) + rest, order="F"), 0, n - 1)


def mode_n_product(t, B, n):
    """Mode-n product ``t x_n B``; ``B`` has shape (J, I_n)."""
    t = np.asarray(t)
    B = np.asarray(B)
    if B.ndim != 2:
        raise ValueError("B must be a matrix")
    if not 1 <= n <= t.ndim:
        raise ValueError(f"mode must satisfy 1 <= n <= {t.ndim}, got {n}")
    if B.shape[1] != t.shape[n - 1]:
        raise ValueError(
            f"B has {B.shape[1]} columns but mode {n} of the tensor has extent {t.shape[n - 1]}"
        )
    out = np.tensordot(B, t, axes=(1, n - 1))
    return np.moveaxis(out, 0, n - 1)


def mode_nm_product(a, b, n, m):
    """Contract mode ``n`` of ``a`` with mode ``m`` of ``b`` (both 1-based).

    The result carries the remaining modes of ``a`` followed by the remaining
    modes of ``b``, so ``Q1 x_2^1 Q2`` for two matrices is ``Q1 @ Q2``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if not (1 <= n <= a.ndim and 1 <= m <= b.ndim):
        raise ValueError(f"mode pair ({n}, {m}) out of range for orders {a.ndim}, {b.ndim}")
    if a.shape[n - 1] != b.shape[m - 1]:
        raise ValueError(
            f"contracted extents differ: {a.shape[n - 1]} (mode {n}) vs {b.shape[m - 1]} (mode {m})"
        )
    return np.tensordot(a, b, axes=(n - 1, m - 1))


def inner(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"inner product needs equal dims, got {a.shape} and {b.shape}")
    return float(np.vdot(a, b))


def frobenius_norm(t):
    return float(np.linalg.norm(np.asarray(t).ravel(order="K")))


def kron(A, B):
    """Kronecker product of two matrices (vectors are treated as columns)."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    return np.kron(A, B)


def khatri_rao(A, B):
    """Columnwise Kronecker product: column j is ``kron(A[:, j], B[:, j])``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2:
        raise ValueError("khatri_rao expects two matrices")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column counts differ: {A.shape[1]} vs {B.shape[1]}")
    return (A[:, None, :] * B[None, :, :]).reshape(A.shape[0] * B.shape[0], A.shape[1])


def write_dnt(t, path):
    """Write a tensor in the DNT1 binary format."""
    t = np.asarray(t, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(DNT_MAGIC)
        fh.write(struct.pack("<Q", t.ndim))
        fh.write(struct.pack(f"<{t.ndim}Q", *t.shape))
        fh.write(t.ravel(order="F").astype("<f8", copy=False).tobytes())


def read_dnt(path):
    """Read a DNT1 file; the result is Fortran-contiguous."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != DNT_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}")
    try:
        (N,) = struct.unpack_from("<Q", raw, 4)
        dims = struct.unpack_from(f"<{N}Q", raw, 12)
    except struct.error as exc:
        raise FormatError(f"{path}: truncated header") from exc
    offset = 12 + 8 * N
    size = int(np.prod(dims)) if N else 1
    if len(raw) != offset + 8 * size:
        raise FormatError(f"{path}: expected {size} doubles, payload has {(len(raw) - offset) / 8:g}")
    data = np.frombuffer(raw, dtype="<f8", count=size, offset=offset)
    return data.astype(np.float64).reshape(dims, order="F")

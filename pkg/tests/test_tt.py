import itertools
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randtt import TTTensor, left_ortho_defect, read_tt, tt_contract, tt_entry, tt_svd, write_tt
from randtt.datasets import random_tt
from randtt.exceptions import FormatError, InvalidStructureError


def brute_contract(cores):
    """Dense tensor from the definition: each entry is a product of core slices."""
    dims = [c.shape[1] for c in cores]
    out = np.empty(dims)
    for idx in itertools.product(*(range(d) for d in dims)):
        v = np.ones((1, 1))
        for c, i in zip(cores, idx):
            v = v @ c[:, i, :]
        out[idx] = v[0, 0]
    return out


def test_all_ones_rank_one():
    tt = TTTensor([np.ones((1, d, 1)) for d in (2, 3, 4)])
    assert np.all(tt_contract(tt) == 1)
    assert tt.ranks == (1, 1)
    assert tt_entry(tt, (1, 2, 3)) == 1.0


def test_zero_core_gives_zero_entries():
    tt = random_tt((2, 3, 2), (2, 2), seed=1)
    tt.cores[1] = np.zeros_like(tt.cores[1])
    for idx in itertools.product(range(2), range(3), range(2)):
        assert tt_entry(tt, idx) == 0.0


def test_entry_matches_contraction():
    tt = random_tt((3, 4, 2, 3), (2, 3, 2), seed=2)
    full = tt_contract(tt)
    for idx in itertools.product(range(3), range(4), range(2), range(3)):
        assert tt[idx] == pytest.approx(full[idx], rel=1e-12, abs=1e-12)
    with pytest.raises(ValueError):
        tt_entry(tt, (3, 0, 0, 0))
    with pytest.raises(ValueError):
        tt_entry(tt, (0, 0, 0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), st.data())
def test_contract_matches_brute_force(dims, data):
    ranks = tuple(data.draw(st.integers(1, 3)) for _ in range(len(dims) - 1))
    seed = data.draw(st.integers(0, 1000))
    tt = random_tt(dims, ranks, seed=seed) if ranks else TTTensor(
        [np.random.default_rng(seed).standard_normal((1, dims[0], 1))])
    np.testing.assert_allclose(tt_contract(tt), brute_contract(tt.cores), rtol=1e-12, atol=1e-12)


def test_contract_is_fortran_ordered():
    assert tt_contract(random_tt((3, 4, 5), (2, 2), seed=0)).flags.f_contiguous


@pytest.mark.parametrize("cores", [
    [np.ones((1, 2, 2)), np.ones((3, 2, 1))],
    [np.ones((2, 2, 1))],
    [np.ones((1, 2, 2)), np.ones((2, 2, 2))],
    [np.ones((1, 2)), np.ones((1, 2, 1))],
    [np.ones((1, 0, 1))],
])
def test_invalid_structure(cores):
    with pytest.raises(InvalidStructureError):
        TTTensor(cores)


def test_left_ortho_defect():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    tt = TTTensor([Q.reshape(1, 8, 3, order="F"), rng.standard_normal((3, 5, 1))])
    assert left_ortho_defect(tt, 1) <= 1e-12
    tt.cores[0] = 2 * tt.cores[0]
    assert left_ortho_defect(tt, 1) == pytest.approx(3 * np.sqrt(3), rel=1e-12)
    with pytest.raises(ValueError):
        left_ortho_defect(tt, 2)


def test_tt_svd_cores_are_left_orthonormal():
    t = np.random.default_rng(4).standard_normal((4, 5, 3, 6))
    res = tt_svd(t, 0.3)
    for n in range(1, 4):
        assert left_ortho_defect(res.tt, n) <= 1e-10


def test_ttc_roundtrip(tmp_path):
    tt = random_tt((3, 4, 2), (2, 3), seed=5)
    path = tmp_path / "a.ttc"
    write_tt(tt, path)
    raw = path.read_bytes()
    assert raw[:4] == b"TTC1"
    assert struct.unpack_from("<Q3Q2Q", raw, 4) == (3, 3, 4, 2, 2, 3)
    back = read_tt(path)
    assert back.ranks == tt.ranks and back.dims == tt.dims
    for a, b in zip(tt.cores, back.cores):
        assert a.tobytes(order="F") == b.tobytes(order="F")
    write_tt(back, tmp_path / "b.ttc")
    assert (tmp_path / "b.ttc").read_bytes() == raw


def test_ttc_truncated_and_bad_magic(tmp_path):
    path = tmp_path / "a.ttc"
    write_tt(random_tt((2, 2), (2,), seed=0), path)
    raw = path.read_bytes()
    for name, data in [("short", raw[:-8]), ("header", raw[:10]), ("magic", b"TTC2" + raw[4:])]:
        (tmp_path / name).write_bytes(data)
        with pytest.raises(FormatError):
            read_tt(tmp_path / name)


def test_ttc_zero_rank_is_invalid_structure(tmp_path):
    # header declares rank 0 between two cores; payload size is then consistent
    header = b"TTC1" + struct.pack("<Q2Q1Q", 2, 2, 2, 0)
    (tmp_path / "z.ttc").write_bytes(header)
    with pytest.raises(InvalidStructureError):
        read_tt(tmp_path / "z.ttc")

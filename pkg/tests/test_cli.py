import csv
import io

import numpy as np
import pytest

from randtt import read_tt, relative_error, tt_contract
from randtt.cli import AGG_COLUMNS, COLUMNS, main
from randtt.tensor import read_dnt, write_dnt

from conftest import exact_rank_tensor


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def exact_file(tmp_path):
    path = tmp_path / "x.dnt"
    write_dnt(exact_rank_tensor(), path)
    return path


def test_gen_is_deterministic(tmp_path, capsys):
    args = ["gen", "--family", "tt-noise", "--dims", "6,6,6,6", "--core-ranks", "2,2,2",
            "--gamma", "1e-4", "--seed", 7]
    assert run(capsys, *args, "--out", tmp_path / "a.dnt")[0] == 0
    assert run(capsys, *args, "--out", tmp_path / "b.dnt")[0] == 0
    assert (tmp_path / "a.dnt").read_bytes() == (tmp_path / "b.dnt").read_bytes()
    assert read_dnt(tmp_path / "a.dnt").shape == (6, 6, 6, 6)


def test_gen_smooth_family(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--family", "func-hilbert", "--extent", 5, "--out", tmp_path / "d.dnt")
    assert code == 0 and out.startswith("dims=5,5,5,5,5")
    t = read_dnt(tmp_path / "d.dnt")
    assert t[0, 0, 0, 0, 0] == pytest.approx(4 / 10)


def test_gen_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--family", "tt-noise", "--core-ranks", "2", "--gamma", "0.1", "--out", str(tmp_path / "a")])
    assert exc.value.code == 2
    assert "--dims" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--family", "func-sin", "--extent", "60", "--out", str(tmp_path / "a")])
    assert exc.value.code == 2


def test_decompose_rand_kr_verify(exact_file, tmp_path, capsys):
    code, out, _ = run(capsys, "decompose", "--in", exact_file, "--method", "rand", "--sketch", "kr-gaussian",
                       "--ranks", "2,3,2", "--oversample", 10, "--power", 0, "--seed", 1, "--verify",
                       "--out", tmp_path / "x.ttc")
    assert code == 0
    (row,) = rows_of(",".join(COLUMNS) + "\n" + out)
    assert row["tt_ranks"] == "2,3,2"
    assert float(row["re"]) <= 1e-8
    assert row["sketch"] == "kr-gaussian" and row["q"] == "0" and row["R"] == "10"
    tt = read_tt(tmp_path / "x.ttc")
    assert relative_error(read_dnt(exact_file), tt_contract(tt)) <= 1e-8


def test_decompose_is_byte_identical(exact_file, tmp_path, capsys):
    for name in ("a.ttc", "b.ttc"):
        assert run(capsys, "decompose", "--in", exact_file, "--method", "adaptive", "--eps", "1e-6",
                   "--sketch", "sdct", "--seed", 4, "--out", tmp_path / name)[0] == 0
    assert (tmp_path / "a.ttc").read_bytes() == (tmp_path / "b.ttc").read_bytes()


def test_decompose_report_appends(exact_file, tmp_path, capsys):
    report = tmp_path / "r.csv"
    for method, flag in [("tt-svd", ["--eps", "1e-8"]), ("greedy", ["--eps", "1e-3"]),
                         ("adaptive", ["--eps", "1e-6", "--block", "1"])]:
        assert run(capsys, "decompose", "--in", exact_file, "--method", method, *flag,
                   "--report", report, "--verify")[0] == 0
    rows = list(csv.DictReader(report.open()))
    assert [r["method"] for r in rows] == ["tt-svd", "greedy", "adaptive"]
    assert report.read_text().splitlines()[0] == ",".join(COLUMNS)
    assert rows[0]["tt_ranks"] == "2,3,2"
    assert rows[1]["re"] == ""
    assert float(rows[2]["estimator"]) == pytest.approx(float(rows[2]["re"]), rel=1e-3, abs=1e-12)


def test_decompose_clamp_column(tmp_path, capsys):
    path = tmp_path / "s.dnt"
    write_dnt(np.random.default_rng(0).standard_normal((3, 4, 5)), path)
    code, out, _ = run(capsys, "decompose", "--in", path, "--method", "rand", "--ranks", "2,2")
    assert code == 0
    (row,) = rows_of(",".join(COLUMNS) + "\n" + out)
    assert row["clamped"] == "1;2"


@pytest.mark.parametrize("argv", [
    ["--method", "rand-gram", "--ranks", "2,3,2", "--power", "0"],
    ["--method", "rand", "--eps", "0.1"],
    ["--method", "tt-svd", "--ranks", "2,2,2"],
    ["--method", "tt-svd", "--eps", "2"],
    ["--method", "rand", "--ranks", "2,2"],
    ["--method", "nope", "--ranks", "2,2,2"],
])
def test_decompose_usage_errors(exact_file, argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["decompose", "--in", str(exact_file), *argv])
    assert exc.value.code == 2


def test_rand_gram_power_message(exact_file, capsys):
    with pytest.raises(SystemExit):
        main(["decompose", "--in", str(exact_file), "--method", "rand-gram", "--ranks", "2,3,2", "--power", "0"])
    assert "rand-gram requires --power >= 1" in capsys.readouterr().err


def test_decompose_io_and_format_failures(tmp_path, capsys):
    assert run(capsys, "decompose", "--in", tmp_path / "missing.dnt", "--method", "tt-svd", "--eps", "0.1")[0] == 1
    bad = tmp_path / "bad.dnt"
    bad.write_bytes(b"NOPE" + bytes(16))
    assert run(capsys, "decompose", "--in", bad, "--method", "tt-svd", "--eps", "0.1")[0] == 1


def test_decompose_numeric_failure(tmp_path, capsys):
    t = np.ones((3, 3, 3))
    t[1, 1, 1] = np.nan
    path = tmp_path / "nan.dnt"
    write_dnt(t, path)
    code, _, err = run(capsys, "decompose", "--in", path, "--method", "tt-svd", "--eps", "0.1")
    assert code == 1 and "numeric" in err


def test_bench_rank_sweep(exact_file, capsys):
    code, out, _ = run(capsys, "bench", "--in", exact_file, "--ranks-sweep", "2,4",
                       "--configs", "rand:gaussian:0,rand:gaussian:1,rand-gram::1", "--trials", 2)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 2 * 3 * 2
    assert list(rows[0]) == COLUMNS
    assert {r["seed"] for r in rows} == {"0", "1"}
    assert all(r["re"] != "" for r in rows)


def test_bench_aggregate(exact_file, capsys):
    code, out, _ = run(capsys, "bench", "--in", exact_file, "--eps-sweep", "0.1,0.01",
                       "--configs", "tt-svd,adaptive", "--trials", 3, "--aggregate")
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == AGG_COLUMNS
    assert len(rows) == 4
    assert all(r["trials"] == "3" for r in rows)
    assert float(rows[0]["re_std"]) == 0.0  # tt-svd is deterministic


def test_bench_snr_sweep_generates(capsys):
    code, out, _ = run(capsys, "bench", "--family", "tt-snr", "--dims", "5,5,5", "--core-ranks", "2,2",
                       "--snr-sweep", "0,20", "--ranks", "2,2", "--configs", "tt-svd-rank")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 2
    assert float(rows[0]["re"]) > float(rows[1]["re"])


def test_bench_parallel_matches_serial(exact_file, capsys):
    args = ["bench", "--in", exact_file, "--ranks-sweep", "2", "--configs", "rand", "--trials", 2]
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--parallel-trials", 2)
    strip = lambda text: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows_of(text)]
    assert strip(serial) == strip(parallel)


@pytest.mark.parametrize("argv", [
    ["--ranks-sweep", ""],
    ["--ranks-sweep", "2", "--eps-sweep", "0.1"],
    ["--eps-sweep", "0.1", "--configs", "rand"],
    ["--ranks-sweep", "2", "--configs", ""],
    ["--ranks-sweep", "2", "--configs", "rand-gram::0"],
    [],
])
def test_bench_usage_errors(exact_file, argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--in", str(exact_file), *argv])
    assert exc.value.code == 2

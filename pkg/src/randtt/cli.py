"""Command-line benchmark harness.

    randtt gen --family func-hilbert --extent 40 --out d.dnt
    randtt decompose --method tt-svd --eps 1e-5 --in d.dnt --out d.ttc
    randtt bench --family tt-noise --dims 20,20,20,20,20 --core-ranks 5,5,5,5 \\
        --gamma 1e-4 --ranks-sweep 2,4,6,8 --configs rand:gaussian:0,rand-gram::1 --trials 5

Exit status is 0 on success, 1 on runtime or numeric failure and 2 on usage
errors. Setting ``TT_SKETCH_THREADS`` caps the BLAS thread pool.
"""

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import decompose
from .datasets import FAMILIES, GenSpec
from .exceptions import FormatError, NumericError
from .metrics import relative_error
from .sketching import KINDS
from .tensor import read_dnt, write_dnt
from .tt import tt_contract, write_tt

COLUMNS = [
    "method", "sketch", "rank_spec", "eps", "R", "q", "b", "seed", "trial",
    "tt_ranks", "re", "fit", "wall_ms", "estimator", "clamped",
]
AGG_COLUMNS = [
    "method", "sketch", "rank_spec", "eps", "R", "q", "b", "trials",
    "re_mean", "re_std", "fit_mean", "fit_std", "wall_ms_mean",
]
RANK_METHODS = ("tt-svd-rank", "rand", "rand-gram")
EPS_METHODS = ("tt-svd", "greedy", "adaptive")
METHODS = RANK_METHODS + EPS_METHODS
DEFAULT_POWER = {"rand": 0, "rand-gram": 1, "adaptive": 0}
DEFAULT_VERIFY_BUDGET = 2**27


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return values


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return values


def _fmt_ranks(ranks):
    return ",".join(str(int(r)) for r in ranks)


def _fmt_float(x):
    return "" if x is None else repr(float(x))


def run_method(t, method, ranks=None, eps=None, sketch="gaussian", oversample=10,
               power=None, block=10, seed=0, greedy_convention=decompose.GREEDY_REPORTED):
    """Run one decomposition; returns ``(result_or_None, tt_ranks, wall_ms)``.

    ``result`` is None for ``greedy``, which only estimates ranks.
    """
    if power is None:
        power = DEFAULT_POWER.get(method, 0)
    start = time.perf_counter()
    if method == "tt-svd":
        result = decompose.tt_svd(t, eps)
    elif method == "tt-svd-rank":
        result = decompose.tt_svd_fixed_rank(t, ranks)
    elif method == "rand":
        result = decompose.rand_tt_fixed_rank(t, ranks, oversample, power, sketch, seed)
    elif method == "rand-gram":
        result = decompose.rand_tt_fixed_rank_gram(t, ranks, oversample, power, seed)
    elif method == "adaptive":
        result = decompose.adaptive_rand_tt(t, eps, block, power, sketch, seed)
    elif method == "greedy":
        ranks_out = decompose.greedy_tt_rank(t, eps, convention=greedy_convention)
        return None, ranks_out, (time.perf_counter() - start) * 1e3
    else:
        raise UsageError(f"unknown method {method!r}")
    wall_ms = (time.perf_counter() - start) * 1e3
    return result, result.ranks, wall_ms


def report_row(t, method, result, tt_ranks, wall_ms, *, ranks=None, eps=None, sketch="gaussian",
               oversample=10, power=None, block=10, seed=0, trial=0, verify=False,
               verify_budget=DEFAULT_VERIFY_BUDGET):
    if power is None:
        power = DEFAULT_POWER.get(method, 0)
    re = None
    if verify and result is not None and t.size <= verify_budget:
        re = relative_error(t, tt_contract(result.tt))
    estimator = None
    if method == "adaptive" and result is not None and result.norm > 0:
        estimator = np.sqrt(result.estimate) / result.norm
    clamped = ""
    if result is not None:
        clamped = ";".join(str(k + 1) for k, c in enumerate(result.clamped) if c)
    uses_sketch = method in ("rand", "rand-gram", "adaptive")
    return {
        "method": method,
        "sketch": ("gaussian" if method == "rand-gram" else sketch) if uses_sketch else "",
        "rank_spec": _fmt_ranks(ranks) if method in RANK_METHODS else "",
        "eps": _fmt_float(eps) if method in EPS_METHODS else "",
        "R": oversample if method in ("rand", "rand-gram") else "",
        "q": power if uses_sketch else "",
        "b": block if method == "adaptive" else "",
        "seed": seed,
        "trial": trial,
        "tt_ranks": _fmt_ranks(tt_ranks),
        "re": _fmt_float(re),
        "fit": _fmt_float(None if re is None else 1.0 - re),
        "wall_ms": f"{wall_ms:.3f}",
        "estimator": _fmt_float(estimator),
        "clamped": clamped,
    }


def _open_report(path):
    if path is None:
        return sys.stdout, False
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    return open(path, "a", newline=""), exists


def _add_gen_args(p, required_family):
    p.add_argument("--family", choices=FAMILIES, required=required_family)
    p.add_argument("--dims", type=_int_list, help="comma-separated extents (tt-* families)")
    p.add_argument("--core-ranks", type=_int_list, help="comma-separated TT ranks of the signal")
    p.add_argument("--gamma", type=float, help="noise level for tt-noise")
    p.add_argument("--snr-db", type=float, help="signal-to-noise ratio for tt-snr")
    p.add_argument("--extent", type=int, help="grid extent I for func-* families (order 5)")
    p.add_argument("--large", action="store_true",
                   help="allow generated tensors above 2^27 entries")


def _add_method_args(p):
    p.add_argument("--sketch", choices=KINDS, default="gaussian")
    p.add_argument("--oversample", type=int, default=10)
    p.add_argument("--power", type=int, default=None,
                   help="power iterations (default 0 for rand/adaptive, 1 for rand-gram)")
    p.add_argument("--block", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--greedy-convention", choices=(decompose.GREEDY_REPORTED, decompose.GREEDY_PRINTED),
                   default=decompose.GREEDY_REPORTED)
    p.add_argument("--verify-budget", type=int, default=DEFAULT_VERIFY_BUDGET,
                   help="largest tensor (entries) that is reconstructed to compute re")


def build_parser():
    parser = argparse.ArgumentParser(prog="randtt", description="Randomized tensor-train decompositions.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a test tensor as a DNT1 file")
    _add_gen_args(g, required_family=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    d = sub.add_parser("decompose", help="decompose a DNT1 tensor")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--method", choices=METHODS, required=True)
    d.add_argument("--ranks", type=_int_list)
    d.add_argument("--eps", type=float)
    _add_method_args(d)
    d.add_argument("--trial", type=int, default=0)
    d.add_argument("--out", help="TTC1 output path")
    d.add_argument("--report", help="append the CSV row here instead of stdout")
    d.add_argument("--verify", action="store_true", help="reconstruct and report re/fit")

    b = sub.add_parser("bench", help="sweep parameters and emit one CSV row per run")
    b.add_argument("--in", dest="input")
    _add_gen_args(b, required_family=False)
    b.add_argument("--data-seed", type=int, default=0)
    axis = b.add_mutually_exclusive_group(required=True)
    axis.add_argument("--ranks-sweep", type=_int_list, help="uniform ranks mu, one point each")
    axis.add_argument("--eps-sweep", type=_float_list)
    axis.add_argument("--snr-sweep", type=_float_list, help="regenerate a tt-snr tensor per point")
    b.add_argument("--ranks", type=_int_list, help="ranks for --snr-sweep")
    b.add_argument("--eps", type=float, help="tolerance for eps methods under --snr-sweep")
    b.add_argument("--configs", default="rand:gaussian:0",
                   help="comma-separated method[:sketch[:q]] items, e.g. rand:kr-gaussian:1,rand-gram::1")
    _add_method_args(b)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--aggregate", action="store_true", help="emit per-point mean/std instead of raw rows")
    b.add_argument("--parallel-trials", type=int, default=1, metavar="N",
                   help="run trials in N worker processes")
    b.add_argument("--report", help="write CSV here instead of stdout")
    return parser


def _gen_spec(args, parser, seed, snr_db=None):
    family = "tt-snr" if snr_db is not None else args.family
    if family is None:
        parser.error("either --in or --family is required")
    if family.startswith("tt-"):
        if not args.dims:
            parser.error(f"--dims is required for family {family}")
        if not args.core_ranks:
            parser.error(f"--core-ranks is required for family {family}")
        if family == "tt-noise" and args.gamma is None:
            parser.error("--gamma is required for family tt-noise")
        if family == "tt-snr" and snr_db is None and args.snr_db is None:
            parser.error("--snr-db is required for family tt-snr")
        size = int(np.prod(args.dims))
    else:
        if args.extent is None:
            parser.error(f"--extent is required for family {family}")
        size = args.extent**5
    if size > DEFAULT_VERIFY_BUDGET and not args.large:
        parser.error(f"tensor would have {size} entries; pass --large to allow it")
    try:
        return GenSpec(
            family=family, dims=tuple(args.dims) if args.dims else None,
            core_ranks=tuple(args.core_ranks) if args.core_ranks else None,
            gamma=args.gamma, snr_db=snr_db if snr_db is not None else args.snr_db,
            extent=args.extent, seed=seed,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_gen(args, parser):
    spec = _gen_spec(args, parser, args.seed)
    t = spec.generate()
    write_dnt(t, args.out)
    print(f"dims={_fmt_ranks(t.shape)} norm={np.linalg.norm(t.ravel(order='K')):.17g}")
    return 0


def _check_method_flags(parser, method, ranks, eps, power):
    if method in RANK_METHODS and not ranks:
        parser.error(f"{method} requires --ranks")
    if method in RANK_METHODS and eps is not None:
        parser.error(f"{method} takes --ranks, not --eps")
    if method in EPS_METHODS and eps is None:
        parser.error(f"{method} requires --eps")
    if method in EPS_METHODS and ranks:
        parser.error(f"{method} takes --eps, not --ranks")
    if method == "rand-gram" and power is not None and power < 1:
        parser.error("rand-gram requires --power >= 1")
    if eps is not None and not 0 < eps < 1:
        parser.error("--eps must lie in (0, 1)")


def cmd_decompose(args, parser):
    _check_method_flags(parser, args.method, args.ranks, args.eps, args.power)
    t = read_dnt(args.input)
    if args.ranks and len(args.ranks) != t.ndim - 1:
        parser.error(f"--ranks needs {t.ndim - 1} values for a tensor of order {t.ndim}")
    kw = dict(ranks=args.ranks, eps=args.eps, sketch=args.sketch, oversample=args.oversample,
              power=args.power, block=args.block, seed=args.seed)
    result, tt_ranks, wall_ms = run_method(t, args.method, greedy_convention=args.greedy_convention, **kw)
    if result is not None and args.out:
        write_tt(result.tt, args.out)
    row = report_row(t, args.method, result, tt_ranks, wall_ms, trial=args.trial, verify=args.verify,
                     verify_budget=args.verify_budget, **kw)
    fh, exists = _open_report(args.report)
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    if args.report and not exists:
        writer.writeheader()
    writer.writerow(row)
    if fh is not sys.stdout:
        fh.close()
    return 0


def _parse_configs(text, parser, default_sketch, default_power):
    configs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        method = parts[0]
        if method not in METHODS:
            parser.error(f"unknown method {method!r} in --configs")
        sketch = parts[1] if len(parts) > 1 and parts[1] else default_sketch
        if sketch not in KINDS:
            parser.error(f"unknown sketch {sketch!r} in --configs")
        power = default_power
        if len(parts) > 2 and parts[2]:
            try:
                power = int(parts[2].lstrip("q="))
            except ValueError:
                parser.error(f"bad power in --configs item {item!r}")
        configs.append((method, sketch, power))
    if not configs:
        parser.error("--configs is empty")
    return configs


def _bench_task(task):
    t, method, kw, trial, verify_budget = task
    result, tt_ranks, wall_ms = run_method(t, method, **kw)
    return report_row(t, method, result, tt_ranks, wall_ms, trial=trial, verify=True,
                      verify_budget=verify_budget, **kw)


def _aggregate(rows):
    groups = {}
    for row in rows:
        key = tuple(row[c] for c in ("method", "sketch", "rank_spec", "eps", "R", "q", "b"))
        groups.setdefault(key, []).append(row)
    out = []
    for key, members in groups.items():
        re = np.array([float(m["re"]) for m in members if m["re"] != ""])
        wall = np.array([float(m["wall_ms"]) for m in members])
        agg = dict(zip(("method", "sketch", "rank_spec", "eps", "R", "q", "b"), key))
        agg.update(
            trials=len(members),
            re_mean=_fmt_float(re.mean()) if re.size else "",
            re_std=_fmt_float(re.std()) if re.size else "",
            fit_mean=_fmt_float(1 - re.mean()) if re.size else "",
            fit_std=_fmt_float(re.std()) if re.size else "",
            wall_ms_mean=f"{wall.mean():.3f}",
        )
        out.append(agg)
    return out


def cmd_bench(args, parser):
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    configs = _parse_configs(args.configs, parser, args.sketch, args.power)
    sweep = args.ranks_sweep or args.eps_sweep or args.snr_sweep
    if not sweep:
        parser.error("the sweep list is empty")
    if args.eps_sweep and any(m in RANK_METHODS for m, _, _ in configs):
        parser.error("--eps-sweep only applies to tt-svd, greedy and adaptive")
    if args.ranks_sweep and any(m in EPS_METHODS for m, _, _ in configs):
        parser.error("--ranks-sweep only applies to tt-svd-rank, rand and rand-gram")
    for method, _, power in configs:
        if method == "rand-gram" and power is not None and power < 1:
            parser.error("rand-gram requires power >= 1")
    if args.snr_sweep:
        if args.input:
            parser.error("--snr-sweep generates its tensors; drop --in")
        if any(m in RANK_METHODS for m, _, _ in configs) and not args.ranks:
            parser.error("--snr-sweep with rank methods requires --ranks")
        if any(m in EPS_METHODS for m, _, _ in configs) and args.eps is None:
            parser.error("--snr-sweep with eps methods requires --eps")

    base = None
    if not args.snr_sweep:
        base = read_dnt(args.input) if args.input else _gen_spec(args, parser, args.data_seed).generate()

    tasks = []
    for point in sweep:
        if args.snr_sweep:
            t = _gen_spec(args, parser, args.data_seed, snr_db=point).generate()
        else:
            t = base
        ranks, eps = args.ranks, args.eps
        if args.ranks_sweep:
            ranks = [point] * (t.ndim - 1)
        elif args.eps_sweep:
            eps = point
        if ranks and len(ranks) != t.ndim - 1:
            parser.error(f"--ranks needs {t.ndim - 1} values")
        for method, sketch, power in configs:
            for trial in range(args.trials):
                kw = dict(ranks=ranks, eps=eps, sketch=sketch, oversample=args.oversample,
                          power=power, block=args.block, seed=args.seed + trial)
                tasks.append((t, method, kw, trial, args.verify_budget))

    if args.parallel_trials > 1:
        with ProcessPoolExecutor(max_workers=args.parallel_trials) as pool:
            rows = list(pool.map(_bench_task, tasks))
    else:
        rows = [_bench_task(task) for task in tasks]

    columns = COLUMNS
    if args.aggregate:
        rows, columns = _aggregate(rows), AGG_COLUMNS
    fh = sys.stdout if args.report is None else open(args.report, "w", newline="")
    writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    return 0


def _limit_threads():
    value = os.environ.get("TT_SKETCH_THREADS")
    if not value:
        return None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(value))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _limit_threads()
    handlers = {"gen": cmd_gen, "decompose": cmd_decompose, "bench": cmd_bench}
    try:
        return handlers[args.command](args, parser)
    except UsageError as exc:
        parser.error(str(exc))
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"randtt: numeric failure: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError) as exc:
        print(f"randtt: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"randtt: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: build, query, mine, tune, gen-workload, eval, bench.

Machine output goes to stdout (CSV for lists, JSON for scalar records, one
result per line for query); diagnostics go to stderr. Exit codes: 0 success,
1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from .competitors import (
    Bsl1Engine,
    CachedEngine,
    SketchCachedEngine,
    substring_hk_mine,
    topk_trie_mine,
)
from .evaluation import (
    WorkloadConfig,
    accuracy,
    generate_workload,
    load_workload,
    ndcg,
    relative_error,
    reports_to_csv,
    run_benchmark,
    save_workload,
    unescape_pattern,
)
from .fingerprint import DEFAULT_SEED, Fingerprinter
from .index import (
    FormatError,
    build_usi,
    deserialize,
    predicted_index_size_bytes,
    serialize,
)
from .suffix import build_suffix_array
from .topk_approx import approximate_top_k, entry_substring
from .topk_exact import build_tuning_tables, exact_top_k, tune_by_k, tune_by_tau
from .weighted import DataError, UtilitySpec, build_prefix_utility, load_weighted_text

USAGE_ERROR, DATA_ERROR, INTERNAL_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 on usage problems; this tool reserves 2 for data errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _env_seed() -> int:
    return int(os.environ.get("USI_SEED", DEFAULT_SEED))


def _apply_thread_env() -> None:
    threads = os.environ.get("USI_THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, int(threads)))
        except (ImportError, ValueError):
            pass


def _fmt(value) -> str:
    if value is None:
        return "NA"
    return f"{value:.12g}"


def build_parser() -> _Parser:
    parser = _Parser(prog="usi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from text + weights")
    p.add_argument("--text", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--weight-format", choices=("binary", "text"), default="binary")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--approx", action="store_true", help="mine with the sampling miner")
    p.add_argument("--s", type=int, default=None, help="sampling rounds (default: ceil(log2 n))")
    p.add_argument("--global-op", choices=("sum", "min", "max", "avg"), default="sum")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-verify", action="store_true", help="skip witness checks on lookups")
    p.add_argument("--out", required=True)

    p = sub.add_parser("query", help="answer pattern queries against an index")
    p.add_argument("--index", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern", help="single pattern (hex escapes \\xHH allowed)")
    g.add_argument("--patterns-file")
    p.add_argument("--engine", choices=("usi", "bsl1", "bsl2", "bsl3", "bsl4"),
                   default="usi")
    p.add_argument("--capacity", type=int, default=None,
                   help="cache capacity for bsl2-4 (default: the index's K)")

    p = sub.add_parser("mine", help="mine top-K frequent substrings")
    p.add_argument("--text", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--engine", choices=("exact", "approx", "shk", "tktrie"),
                   default="exact")
    p.add_argument("--approx", action="store_true", help="alias for --engine approx")
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-substring", action="store_true",
                   help="omit the substring column")
    p.add_argument("--out", default="-")

    p = sub.add_parser("tune", help="estimate index parameters from K or tau")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--index")
    g.add_argument("--text")
    g2 = p.add_mutually_exclusive_group(required=True)
    g2.add_argument("--k", type=int)
    g2.add_argument("--tau", type=int)

    p = sub.add_parser("gen-workload", help="generate a query workload file")
    p.add_argument("--text", required=True)
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--frequent-fraction", type=float, default=0.9)
    p.add_argument("--pool-divisor", type=int, default=50)
    p.add_argument("--length-range", type=int, nargs=2, default=(1, 5000),
                   metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="score a mined list against the exact top-K")
    p.add_argument("--text", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--estimated", required=True, help="CSV produced by `usi mine`")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("bench", help="compare engine query latencies on a workload")
    p.add_argument("--text", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--weight-format", choices=("binary", "text"), default="binary")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--engines", default="usi,bsl1,bsl2,bsl3,bsl4")
    p.add_argument("--workload", required=True)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--out", default="-")
    return parser


def _write_out(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _cmd_build(args) -> int:
    wt = load_weighted_text(args.text, args.weights, args.weight_format)
    spec = UtilitySpec(global_op=args.global_op)
    seed = args.seed if args.seed is not None else _env_seed()
    fpr = Fingerprinter(seed=seed)
    idx = build_suffix_array(wt.text)
    psw = build_prefix_utility(wt, spec)
    s = 0
    if args.k <= 0:
        triples = []
    elif args.approx:
        s = args.s if args.s is not None else max(1, math.ceil(math.log2(max(wt.n, 2))))
        triples = approximate_top_k(wt.text, args.k, s=s)
    else:
        tables = build_tuning_tables(idx)
        triples = exact_top_k(tables, idx, args.k)
    index = build_usi(wt, spec, triples, idx=idx, psw=psw, fpr=fpr,
                      verify=not args.no_verify, s=s)
    nbytes = serialize(index, args.out)
    print(f"wrote {args.out}: {nbytes} bytes, {index.meta.k} entries, "
          f"tau_k={index.meta.tau_k}, l_k={index.meta.l_k}", file=sys.stderr)
    return 0


def _cmd_query(args) -> int:
    index = deserialize(args.index)
    if args.pattern is not None:
        patterns = [unescape_pattern(args.pattern)]
    else:
        patterns = load_workload(args.patterns_file)
    engine = _make_engine(args.engine, index, args.capacity)
    lines = [_fmt(engine.query(p)) for p in patterns]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _make_engine(name: str, index, capacity: int | None):
    if name == "usi":
        return index
    k = capacity if capacity is not None else max(index.meta.k, 1)
    base = (index.text, index.suffix, index.psw, index.spec)
    if name == "bsl1":
        return Bsl1Engine(*base)
    if name == "bsl2":
        return CachedEngine(*base, k, "lru")
    if name == "bsl3":
        return CachedEngine(*base, k, "lfq")
    return SketchCachedEngine(*base, k)


def _cmd_mine(args) -> int:
    with open(args.text, "rb") as fh:
        text = fh.read()
    if len(text) == 0:
        raise DataError("empty text")
    engine = "approx" if args.approx else args.engine
    seed = args.seed if args.seed is not None else _env_seed()
    rows = []
    if engine == "exact":
        idx = build_suffix_array(text)
        tables = build_tuning_tables(idx)
        for t in exact_top_k(tables, idx, args.k):
            rows.append((int(idx.sa[t.lb]), t.lcp, t.rb - t.lb + 1))
    elif engine == "approx":
        entries = approximate_top_k(text, args.k, s=args.s)
        rows = [(e.j, e.length, e.freq) for e in entries]
    else:
        miner = substring_hk_mine if engine == "shk" else topk_trie_mine
        mined = miner(text, args.k, seed=seed) if engine == "shk" else miner(text, args.k)
        for sub, est in mined:
            rows.append((text.find(sub), len(sub), est))

    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["witness_pos", "length", "est_freq"]
    if not args.no_substring:
        header.append("substring")
    writer.writerow(header)
    for j, length, est in rows:
        row = [j, length, est]
        if not args.no_substring:
            sub = text[j:j + length]
            shown = sub[:64] + (b"..." if length > 64 else b"")
            row.append(shown.decode("latin1"))
        writer.writerow(row)
    _write_out(buf.getvalue(), args.out)
    return 0


def _cmd_tune(args) -> int:
    if args.index:
        index = deserialize(args.index)
        text, idx = index.text, index.suffix
    else:
        with open(args.text, "rb") as fh:
            text = fh.read()
        idx = build_suffix_array(text)
    tables = build_tuning_tables(idx)
    n = len(text)
    if args.k is not None:
        tau_k, l_k = tune_by_k(tables, args.k)
        record = {
            "tau_k": tau_k,
            "l_k": l_k,
            "predicted_index_size_bytes": predicted_index_size_bytes(n, args.k),
        }
    else:
        k_tau, l_tau = tune_by_tau(tables, args.tau)
        record = {
            "k_tau": k_tau,
            "l_tau": l_tau,
            "predicted_construction_cost": n * l_tau,
        }
    print(json.dumps(record))
    return 0


def _cmd_gen_workload(args) -> int:
    with open(args.text, "rb") as fh:
        text = fh.read()
    from .weighted import WeightedText

    wt = WeightedText(text, np.ones(len(text)))
    idx = build_suffix_array(text)
    tables = build_tuning_tables(idx)
    seed = args.seed if args.seed is not None else _env_seed()
    cfg = WorkloadConfig(
        total_queries=args.total,
        frequent_fraction=args.frequent_fraction,
        pool_divisor=args.pool_divisor,
        random_length_range=tuple(args.length_range),
        seed=seed,
    )
    patterns = generate_workload(wt, idx, tables, cfg)
    save_workload(patterns, args.out)
    print(f"wrote {args.out}: {len(patterns)} patterns", file=sys.stderr)
    return 0


def _cmd_eval(args) -> int:
    with open(args.text, "rb") as fh:
        text = fh.read()
    idx = build_suffix_array(text)
    tables = build_tuning_tables(idx)
    exact = exact_top_k(tables, idx, args.k)
    estimated = []
    with open(args.estimated, "r", encoding="ascii") as fh:
        for row in csv.DictReader(fh):
            j, length = int(row["witness_pos"]), int(row["length"])
            if "substring" in row and len(row["substring"].encode("latin1")) == length:
                sub = row["substring"].encode("latin1")
            elif j >= 0:
                sub = text[j:j + length]
            else:
                continue
            estimated.append((sub, int(row["est_freq"])))
    record = {
        "k": args.k,
        "accuracy_true_freq": accuracy(exact, estimated, idx, text, "true"),
        "accuracy_reported_freq": accuracy(exact, estimated, idx, text, "reported"),
        "relative_error": relative_error(exact, estimated, idx, text),
        "ndcg": ndcg(exact, estimated, idx, text),
    }
    if args.format == "json":
        print(json.dumps(record))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["metric", "value"])
        for key, value in record.items():
            writer.writerow([key, value])
        sys.stdout.write(buf.getvalue())
    return 0


def _cmd_bench(args) -> int:
    wt = load_weighted_text(args.text, args.weights, args.weight_format)
    spec = UtilitySpec()
    idx = build_suffix_array(wt.text)
    psw = build_prefix_utility(wt, spec)
    tables = build_tuning_tables(idx)
    patterns = load_workload(args.workload)

    engines = {}
    construction = {}
    for name in args.engines.split(","):
        name = name.strip()
        t0 = time.perf_counter()
        if name == "usi":
            k = min(args.k, tables.total_substrings)
            engine = build_usi(wt, spec, exact_top_k(tables, idx, k), idx=idx, psw=psw)
        else:
            engine = _make_engine(name, _FallbackShim(wt.text, idx, psw, spec, args.k),
                                  args.k)
        construction[name] = (time.perf_counter() - t0, None)
        engines[name] = engine
    reports = run_benchmark(engines, {"workload": patterns},
                            repetitions=args.repetitions,
                            k=args.k, n=wt.n, construction=construction)
    _write_out(reports_to_csv(reports), args.out)
    return 0


class _FallbackShim:
    """Adapter so _make_engine can build baselines without a serialized index."""

    def __init__(self, text, suffix, psw, spec, k):
        self.text, self.suffix, self.psw, self.spec = text, suffix, psw, spec

        class _Meta:
            pass

        self.meta = _Meta()
        self.meta.k = k


_COMMANDS = {
    "build": _cmd_build,
    "query": _cmd_query,
    "mine": _cmd_mine,
    "tune": _cmd_tune,
    "gen-workload": _cmd_gen_workload,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def dispatch(argv: list[str]) -> int:
    _apply_thread_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except (DataError, FormatError, FileNotFoundError, PermissionError) as exc:
        print(f"usi: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"usi: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except Exception as exc:  # invariant violations and bugs
        print(f"usi: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

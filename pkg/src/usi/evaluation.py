"""Workload generation, estimation-quality metrics, and the benchmark harness.

Workloads mix draws from the exact top-(n/divisor) frequent-substring pool
with random substrings, mirroring how indexed texts are actually queried:
mostly frequent patterns, occasionally arbitrary ones. Quality metrics
compare an estimated top-K list against the exact one through the true
frequencies of the reported substrings (a reported-frequency variant is
also computed, since estimators may undercount what they report).
"""

from __future__ import annotations

import csv
import io
import multiprocessing
import resource
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .suffix import SuffixArrayIndex, pattern_interval
from .topk_approx import SampledEntry, approximate_top_k
from .topk_exact import TopKTriple, TuningTables, build_tuning_tables, expand_triples
from .weighted import WeightedText


@dataclass(frozen=True)
class WorkloadConfig:
    total_queries: int
    frequent_fraction: float = 0.9
    pool_divisor: int = 50
    random_length_range: tuple[int, int] = (1, 5000)
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.frequent_fraction <= 1.0):
            raise ValueError("frequent_fraction must be in [0, 1]")
        if self.random_length_range[0] < 1:
            raise ValueError("minimum random length is 1")
        if self.pool_divisor < 1:
            raise ValueError("pool_divisor must be >= 1")


def generate_workload(wt: WeightedText, idx: SuffixArrayIndex, tables: TuningTables,
                      cfg: WorkloadConfig) -> list[bytes]:
    """Deterministic query patterns: frequent-pool draws plus random substrings.

    The frequent pool is the exact top-(n/pool_divisor) substrings. The
    non-pool remainder is drawn half from the already-selected frequent
    patterns and half as uniform random substrings with lengths in the
    configured range.
    """
    n = wt.n
    pool_size = n // cfg.pool_divisor
    if pool_size < 1:
        raise ValueError(f"pool is empty: n={n} divisor={cfg.pool_divisor}")
    pool_size = min(pool_size, tables.total_substrings)
    lcp_arr, lb_arr, _ = expand_triples(tables, pool_size)
    starts = idx.sa[lb_arr]

    rng = np.random.default_rng(cfg.seed)
    text = wt.text
    n_freq = int(round(cfg.total_queries * cfg.frequent_fraction))
    picks = rng.integers(0, pool_size, n_freq)
    patterns = [
        bytes(text[starts[p]:starts[p] + lcp_arr[p]]) for p in picks
    ]

    lo, hi = cfg.random_length_range
    hi = min(hi, n)
    for _ in range(cfg.total_queries - n_freq):
        if patterns and rng.random() < 0.5:
            patterns.append(patterns[int(rng.integers(0, len(patterns)))])
        else:
            length = int(rng.integers(lo, hi + 1))
            start = int(rng.integers(0, n - length + 1))
            patterns.append(bytes(text[start:start + length]))
    perm = rng.permutation(len(patterns))
    return [patterns[i] for i in perm]


# -- workload files: one pattern per line, non-printables hex-escaped ---------


def escape_pattern(pattern: bytes) -> str:
    out = []
    for b in pattern:
        if b == 0x5C:
            out.append("\\\\")
        elif 0x20 <= b <= 0x7E:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


def unescape_pattern(line: str) -> bytes:
    out = bytearray()
    i = 0
    while i < len(line):
        c = line[i]
        if c == "\\":
            if line[i + 1] == "\\":
                out.append(0x5C)
                i += 2
            elif line[i + 1] == "x":
                out.append(int(line[i + 2:i + 4], 16))
                i += 4
            else:
                raise ValueError(f"bad escape at column {i}")
        else:
            out.append(ord(c))
            i += 1
    return bytes(out)


def save_workload(patterns: list[bytes], path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for p in patterns:
            fh.write(escape_pattern(p) + "\n")


def load_workload(path) -> list[bytes]:
    with open(path, "r", encoding="ascii") as fh:
        return [unescape_pattern(line.rstrip("\n")) for line in fh if line.rstrip("\n")]


# -- estimation quality -------------------------------------------------------


def true_frequency(idx: SuffixArrayIndex, text: bytes, substring: bytes) -> int:
    span = pattern_interval(idx, text, substring)
    return 0 if span is None else span[1] - span[0] + 1


def _as_pairs(estimated, text: bytes) -> list[tuple[bytes, int]]:
    out = []
    for item in estimated:
        if isinstance(item, SampledEntry):
            out.append((text[item.j:item.j + item.length], item.freq))
        else:
            sub, f = item
            out.append((bytes(sub), int(f)))
    return out


def _exact_freqs(exact: list[TopKTriple]) -> list[int]:
    return [t.rb - t.lb + 1 for t in exact]


def accuracy(exact: list[TopKTriple], estimated, idx: SuffixArrayIndex,
             text: bytes, use: str = "true") -> float:
    """Percentage of estimated substrings whose frequency matches the exact set.

    Frequencies are compared as multisets. With use="true" each estimated
    substring contributes its true frequency; with use="reported" it
    contributes the frequency the estimator claimed.
    """
    k = len(exact)
    if k == 0:
        raise ValueError("empty exact reference")
    pool = Counter(_exact_freqs(exact))
    hits = 0
    for sub, reported in _as_pairs(estimated, text)[:k]:
        f = true_frequency(idx, text, sub) if use == "true" else reported
        if pool.get(f, 0) > 0:
            pool[f] -= 1
            hits += 1
    return 100.0 * hits / k


def relative_error(exact: list[TopKTriple], estimated, idx: SuffixArrayIndex,
                   text: bytes) -> float:
    """(sum of exact frequencies - sum of estimated substrings' true frequencies),
    normalized by the former."""
    exact_sum = sum(_exact_freqs(exact))
    if exact_sum <= 0:
        raise ValueError("exact frequency mass must be positive")
    est_sum = sum(
        true_frequency(idx, text, sub)
        for sub, _ in _as_pairs(estimated, text)[:len(exact)]
    )
    return (exact_sum - est_sum) / exact_sum


def ndcg(exact: list[TopKTriple], estimated, idx: SuffixArrayIndex,
         text: bytes) -> float:
    """Rank quality of the estimated list, relevance = true frequency.

    DCG discounts the estimator's ranking by log2(rank+1); the ideal DCG
    ranks the exact frequencies in descending order. Missing tail entries
    contribute zero relevance.
    """
    k = len(exact)
    if k == 0:
        raise ValueError("empty exact reference")
    discounts = 1.0 / np.log2(np.arange(2, k + 2))
    ideal = np.sort(np.array(_exact_freqs(exact), dtype=np.float64))[::-1]
    idcg = float(np.sum(ideal * discounts))
    rel = np.zeros(k)
    for i, (sub, _) in enumerate(_as_pairs(estimated, text)[:k]):
        rel[i] = true_frequency(idx, text, sub)
    return float(np.sum(rel * discounts) / idcg)


# -- benchmark harness --------------------------------------------------------


@dataclass
class MetricsReport:
    """One engine/workload measurement; quality fields apply to miner runs."""

    engine: str
    workload: str
    k: int = 0
    s: int = 0
    n: int = 0
    accuracy_pct: float | None = None
    accuracy_reported_pct: float | None = None
    relative_error: float | None = None
    ndcg: float | None = None
    mean_ns: float | None = None
    median_ns: float | None = None
    p99_ns: float | None = None
    index_size_bytes: int | None = None
    construction_seconds: float | None = None
    peak_construction_bytes: int | None = None
    extra: dict = field(default_factory=dict)

    def rows(self):
        named = {
            "accuracy_true_freq": self.accuracy_pct,
            "accuracy_reported_freq": self.accuracy_reported_pct,
            "relative_error": self.relative_error,
            "ndcg": self.ndcg,
            "mean_query_ns": self.mean_ns,
            "median_query_ns": self.median_ns,
            "p99_query_ns": self.p99_ns,
            "index_size_bytes": self.index_size_bytes,
            "construction_seconds": self.construction_seconds,
            "peak_construction_bytes": self.peak_construction_bytes,
        }
        named.update(self.extra)
        for metric, value in named.items():
            if value is not None:
                yield (self.engine, self.workload, self.k, self.s, self.n,
                       metric, value)


def time_queries(query, patterns: list[bytes], repetitions: int = 3) -> np.ndarray:
    """Per-query latencies (ns) over the measured passes; the warm-up pass is dropped."""
    if repetitions < 2:
        raise ValueError("need at least one warm-up and one measured pass")
    timer = time.perf_counter_ns
    all_ns = []
    for rep in range(repetitions):
        ns = np.empty(len(patterns), np.int64)
        for i, p in enumerate(patterns):
            t0 = timer()
            query(p)
            ns[i] = timer() - t0
        if rep > 0:
            all_ns.append(ns)
    return np.concatenate(all_ns) if all_ns else np.empty(0, np.int64)


def run_benchmark(engines: dict, workloads: dict[str, list[bytes]],
                  repetitions: int = 3, k: int = 0, s: int = 0, n: int = 0,
                  construction: dict | None = None) -> list[MetricsReport]:
    """Latency statistics per engine and workload, plus per-engine build metrics.

    `engines` maps name -> object with query(pattern); `construction`
    optionally maps name -> (seconds, peak_bytes). Engines run one at a
    time so timing is not contaminated.
    """
    reports = []
    for name, engine in engines.items():
        size = engine.serialized_size() if hasattr(engine, "serialized_size") else None
        built = (construction or {}).get(name)
        first = True
        if not workloads:
            reports.append(MetricsReport(
                engine=name, workload="", k=k, s=s, n=n, index_size_bytes=size,
                construction_seconds=built[0] if built else None,
                peak_construction_bytes=built[1] if built else None,
            ))
            continue
        for wname, patterns in workloads.items():
            report = MetricsReport(engine=name, workload=wname, k=k, s=s, n=n)
            if patterns:
                ns = time_queries(engine.query, patterns, repetitions)
                report.mean_ns = float(ns.mean())
                report.median_ns = float(np.median(ns))
                report.p99_ns = float(np.percentile(ns, 99))
            if first:
                report.index_size_bytes = size
                if built:
                    report.construction_seconds = built[0]
                    report.peak_construction_bytes = built[1]
                first = False
            reports.append(report)
    return reports


def reports_to_csv(reports: list[MetricsReport], sink=None) -> str:
    """CSV rows (engine, workload, k, s, n, metric, value)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["engine", "workload", "k", "s", "n", "metric", "value"])
    for report in reports:
        for row in report.rows():
            writer.writerow(row)
    text = buf.getvalue()
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="ascii") as fh:
                fh.write(text)
    return text


# -- peak-memory measurement (fresh child process per job) --------------------


def _job_noop(text_path: str, k: int, s: int):
    with open(text_path, "rb") as fh:
        text = fh.read()
    return len(text) and None


def _job_mine_exact(text_path: str, k: int, s: int):
    from .suffix import build_suffix_array
    with open(text_path, "rb") as fh:
        text = fh.read()
    idx = build_suffix_array(text)
    tables = build_tuning_tables(idx)
    lcp_arr, lb_arr, rb_arr = expand_triples(tables, k)
    return (rb_arr - lb_arr + 1).tolist()


def _job_mine_approx(text_path: str, k: int, s: int):
    with open(text_path, "rb") as fh:
        text = fh.read()
    entries = approximate_top_k(text, k, s=s)
    return [(e.j, e.length, e.freq) for e in entries]


_JOBS = {"noop": _job_noop, "exact": _job_mine_exact, "approx": _job_mine_approx}


def _job_runner(conn, job: str, text_path: str, k: int, s: int):
    result = _JOBS[job](text_path, k, s)
    rss_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    conn.send((rss_kb * 1024, result))
    conn.close()


def mining_peak_rss(text_path: str, job: str, k: int = 0, s: int = 0):
    """Run one mining job in a fresh child process; return (peak_rss_bytes, result).

    A spawned interpreter keeps the parent's footprint out of the
    measurement; the child reads the text from disk itself.
    """
    ctx = multiprocessing.get_context("spawn")
    parent, child = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_job_runner, args=(child, job, text_path, k, s))
    proc.start()
    child.close()
    try:
        payload = parent.recv()
    finally:
        proc.join()
    if proc.exitcode != 0:
        raise RuntimeError(f"mining job {job} failed with exit code {proc.exitcode}")
    return payload

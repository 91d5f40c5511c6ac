"""Space-efficient approximate top-K frequent-substring mining.

The text positions are partitioned into s sampling rounds. Each round sorts
only its sampled suffixes (sparse SA + LCP via longest-common-extension
queries), extracts the round's top-K substrings, and merges them into the
running list by summing the frequencies of substrings seen in both. Because
the rounds partition all positions and per-round counts are exact, every
reported frequency is a lower bound on the true one; with s = 1 the miner
degenerates to the exact algorithm.
"""

from __future__ import annotations

import functools
import math
from typing import NamedTuple

import numpy as np

from . import _vecstr
from .fingerprint import Fingerprinter, as_byte_array
from .suffix import lcp_interval_arrays, leaf_parent_depths


class SampledEntry(NamedTuple):
    """A mined substring text[j : j+length] with its accumulated sample frequency."""

    j: int
    length: int
    freq: int


class LceOracle:
    """Longest-common-extension queries over one text.

    strategy "direct" compares bytes with no per-text state; "fingerprint"
    binary-searches the longest matching prefix over a Karp-Rabin prefix
    table (O(log n) per query, O(n) extra words). Both return exact values.
    """

    def __init__(self, text: bytes, strategy: str = "direct",
                 fingerprinter: Fingerprinter | None = None):
        if strategy not in ("direct", "fingerprint"):
            raise ValueError(f"unknown LCE strategy {strategy!r}")
        self.text = text
        self.data = as_byte_array(text)
        self.n = len(text)
        self.strategy = strategy
        self._fpr = None
        if strategy == "fingerprint":
            self._fpr = fingerprinter or Fingerprinter()
            self._fpr.index_text(text)

    def lce(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("position out of range")
        if self.strategy == "direct":
            return _vecstr.lce_bytes(self.text, i, j)
        if i == j:
            return self.n - i
        fpr = self._fpr
        hi = min(self.n - i, self.n - j)
        if self.text[i] != self.text[j]:
            return 0
        lo = 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if fpr.substring_fp(i, mid) == fpr.substring_fp(j, mid):
                lo = mid
            else:
                hi = mid - 1
        return lo

    def compare_suffixes(self, i: int, j: int) -> int:
        """-1/0/+1 ordering of suffixes i and j (a proper prefix sorts first)."""
        if i == j:
            return 0
        l = self.lce(i, j)
        li, lj = self.n - i, self.n - j
        if l >= li or l >= lj:
            return -1 if li < lj else 1
        return -1 if self.text[i + l] < self.text[j + l] else 1


def sample_positions(n: int, s: int, round_index: int) -> np.ndarray:
    """Positions round_index + r*s below n; the s rounds partition [0, n)."""
    if not (0 <= round_index < s <= n):
        raise ValueError(f"need 0 <= round {round_index} < s {s} <= n {n}")
    return np.arange(round_index, n, s, dtype=np.int64)


def build_sparse_structures(text: bytes, positions: np.ndarray, oracle: LceOracle):
    """Sparse suffix array and LCP array over the sampled positions only."""
    positions = np.asarray(positions, dtype=np.int64)
    if positions.size == 0:
        raise ValueError("no sampled positions")
    n = len(text)
    if oracle.strategy == "direct":
        order = _vecstr.lex_order(oracle.data, positions, n - positions)
        ssa = positions[order]
        slcp = np.zeros(ssa.size, np.int64)
        if ssa.size > 1:
            a, b = ssa[:-1], ssa[1:]
            slcp[1:] = _vecstr.pair_lce(oracle.data, a, b, np.minimum(n - a, n - b))
    else:
        ssa = np.array(
            sorted(positions.tolist(), key=functools.cmp_to_key(oracle.compare_suffixes)),
            dtype=np.int64,
        )
        slcp = np.zeros(ssa.size, np.int64)
        for r in range(1, ssa.size):
            slcp[r] = oracle.lce(int(ssa[r - 1]), int(ssa[r]))
    return ssa, slcp


def round_top_k(text: bytes, ssa: np.ndarray, slcp: np.ndarray, k: int) -> list[SampledEntry]:
    """Top-k substrings by in-sample frequency, as witness/length/frequency entries.

    Same node expansion and tie order as the exact miner, applied to the
    sparse structures of one round.
    """
    j, length, freq = _round_top_k_arrays(len(text), ssa, slcp, k)
    return [SampledEntry(int(a), int(b), int(c)) for a, b, c in zip(j, length, freq)]


def _round_top_k_arrays(n: int, ssa: np.ndarray, slcp: np.ndarray, k: int):
    slcp32 = np.asarray(slcp, dtype=np.int32)
    depth, lb, rb, parent = lcp_interval_arrays(slcp32)
    f = (rb - lb + 1).astype(np.int64)
    q = (depth - parent).astype(np.int64)
    sd = depth.astype(np.int64)
    wit = ssa[lb].astype(np.int64)
    lbs = lb.astype(np.int64)

    leaf_parent = leaf_parent_depths(slcp32).astype(np.int64)
    leaf_sd = n - ssa
    leaf_q = leaf_sd - leaf_parent
    keep = leaf_q > 0
    f = np.concatenate([f, np.ones(int(keep.sum()), np.int64)])
    q = np.concatenate([q, leaf_q[keep]])
    sd = np.concatenate([sd, leaf_sd[keep]])
    wit = np.concatenate([wit, ssa[keep]])
    lbs = np.concatenate([lbs, np.flatnonzero(keep).astype(np.int64)])

    order = np.lexsort((lbs, sd, -f))
    f, q, sd, wit = f[order], q[order], sd[order], wit[order]

    q_prefix = np.cumsum(q)
    total = int(q_prefix[-1]) if q_prefix.size else 0
    k = min(k, total)
    if k == 0:
        empty = np.empty(0, np.int64)
        return empty, empty, empty
    cut = int(np.searchsorted(q_prefix, k, side="left"))
    counts = q[:cut + 1].copy()
    counts[cut] -= int(q_prefix[cut]) - k
    node = np.repeat(np.arange(cut + 1), counts)
    starts = q_prefix[:cut + 1] - q[:cut + 1]
    offset = np.arange(k) - np.repeat(starts, counts)
    lengths = (sd - q)[node] + offset + 1
    return wit[node], lengths, f[node]


def merge_round_lists(prev: list[SampledEntry], cur: list[SampledEntry], k: int,
                      oracle: LceOracle) -> list[SampledEntry]:
    """Union of two entry lists, frequencies of equal substrings summed, top-k kept.

    Entries are ordered lexicographically by their witnessed substrings via
    LCE comparisons so duplicates land adjacently; the re-sort by summed
    frequency breaks ties shorter-first, then lexicographically.
    """
    if not prev and not cur:
        return []
    j = np.array([e.j for e in prev] + [e.j for e in cur], np.int64)
    ln = np.array([e.length for e in prev] + [e.length for e in cur], np.int64)
    fr = np.array([e.freq for e in prev] + [e.freq for e in cur], np.int64)
    jj, ll, ff = _merge_arrays(oracle, j, ln, fr, k)
    return [SampledEntry(int(a), int(b), int(c)) for a, b, c in zip(jj, ll, ff)]


def _merge_arrays(oracle: LceOracle, j, ln, fr, k):
    order = _vecstr.lex_order(oracle.data, j, ln)
    j, ln, fr = j[order], ln[order], fr[order]
    same = np.zeros(j.size, bool)
    if j.size > 1:
        a, b = j[:-1], j[1:]
        cap = np.minimum(ln[:-1], ln[1:])
        same[1:] = (ln[1:] == ln[:-1]) & (
            _vecstr.pair_lce(oracle.data, a, b, cap) >= cap
        )
    starts = np.flatnonzero(~same)
    summed = np.add.reduceat(fr, starts)
    j, ln = j[starts], ln[starts]
    final = np.lexsort((np.arange(starts.size), ln, -summed))[:k]
    return j[final], ln[final], summed[final]


def approximate_top_k(text: bytes, k: int, s: int | None = None,
                      oracle: LceOracle | None = None,
                      over_sample: int = 1) -> list[SampledEntry]:
    """Run the s sampling rounds and return at most k merged entries.

    Defaults: s = ceil(log2 n) and the direct-comparison LCE oracle. Every
    reported frequency is <= the substring's true frequency; s = 1 matches
    the exact miner's output frequencies.
    """
    n = len(text)
    if k < 1:
        raise ValueError("k must be positive")
    if s is None:
        s = max(1, math.ceil(math.log2(max(n, 2))))
    if not (1 <= s <= n):
        raise ValueError(f"s={s} outside [1, n={n}]")
    if oracle is None:
        oracle = LceOracle(text, "direct")
    cap = k * max(1, over_sample)
    merged: list[SampledEntry] = []
    for i in range(s):
        positions = sample_positions(n, s, i)
        ssa, slcp = build_sparse_structures(text, positions, oracle)
        cur = round_top_k(text, ssa, slcp, cap)
        merged = merge_round_lists(merged, cur, cap, oracle)
    return merged[:k]


def entry_substring(text: bytes, entry: SampledEntry) -> bytes:
    return text[entry.j:entry.j + entry.length]

"""Exact top-K frequent-substring mining and the K <-> tau tuning tables.

A frequency triple stands for one suffix-tree node: q consecutive substring
lengths sharing the node's frequency and SA interval. Triples sorted by
(frequency desc, string depth asc, lb asc) give a prefix-closed sequence in
which every ancestor precedes its descendants, so the distinct-length count
over any prefix of the table is simply the running maximum string depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .suffix import SuffixArrayIndex, lcp_interval_arrays, leaf_parent_depths


class TopKTriple(NamedTuple):
    """One mined substring: its length and the SA interval of its occurrences."""

    lcp: int
    lb: int
    rb: int


class FrequencyTriple(NamedTuple):
    """A suffix-tree node: frequency, edge letters (distinct substrings), string depth."""

    f: int
    q: int
    sd: int
    lb: int
    rb: int


@dataclass(frozen=True)
class TuningTables:
    """Frequency-sorted node triples plus prefix counters.

    q_prefix[i] counts the distinct substrings represented by triples [0, i];
    l_prefix[i] counts their distinct lengths.
    """

    f: np.ndarray
    q: np.ndarray
    sd: np.ndarray
    lb: np.ndarray
    q_prefix: np.ndarray
    l_prefix: np.ndarray
    n: int

    def __len__(self) -> int:
        return self.f.size

    @property
    def total_substrings(self) -> int:
        return int(self.q_prefix[-1]) if len(self) else 0

    def triple(self, i: int) -> FrequencyTriple:
        return FrequencyTriple(
            int(self.f[i]), int(self.q[i]), int(self.sd[i]),
            int(self.lb[i]), int(self.lb[i] + self.f[i] - 1),
        )


def build_tuning_tables(idx: SuffixArrayIndex) -> TuningTables:
    """One bottom-up traversal + one sort; O(n) sized tables."""
    n = idx.n
    depth, lb, rb, parent = lcp_interval_arrays(idx.lcp)
    f_node = (rb - lb + 1).astype(np.int64)
    q_node = (depth - parent).astype(np.int64)
    sd_node = depth.astype(np.int64)
    lb_node = lb.astype(np.int64)

    # Leaves: each suffix contributes the lengths between its deepest shared
    # prefix and its full length, all with frequency 1. Suffixes that are
    # prefixes of other suffixes contribute nothing (q = 0).
    leaf_parent = leaf_parent_depths(idx.lcp).astype(np.int64)
    leaf_sd = (n - idx.sa).astype(np.int64)
    leaf_q = leaf_sd - leaf_parent
    keep = leaf_q > 0
    leaf_idx = np.flatnonzero(keep).astype(np.int64)

    f = np.concatenate([f_node, np.ones(leaf_idx.size, np.int64)])
    q = np.concatenate([q_node, leaf_q[keep]])
    sd = np.concatenate([sd_node, leaf_sd[keep]])
    lbs = np.concatenate([lb_node, leaf_idx])

    order = np.lexsort((lbs, sd, -f))
    f, q, sd, lbs = f[order], q[order], sd[order], lbs[order]
    return TuningTables(
        f=f, q=q, sd=sd, lb=lbs,
        q_prefix=np.cumsum(q),
        l_prefix=np.maximum.accumulate(sd),
        n=n,
    )


def exact_top_k(tables: TuningTables, idx: SuffixArrayIndex, k: int) -> list[TopKTriple]:
    """The K most frequent substrings (ties by table order), as SA-interval triples.

    Scans the sorted table left to right, expanding each node triple into its
    q substrings of consecutive lengths; O(n + K).
    """
    if k < 1:
        raise ValueError("k must be positive")
    lcp_arr, lb_arr, rb_arr = expand_triples(tables, k)
    return [
        TopKTriple(int(l), int(b), int(r))
        for l, b, r in zip(lcp_arr, lb_arr, rb_arr)
    ]


def expand_triples(tables: TuningTables, k: int):
    """Array form of exact_top_k: (lengths, lbs, rbs) of the top-k substrings."""
    total = tables.total_substrings
    k = min(k, total)
    if k == 0:
        empty = np.empty(0, np.int64)
        return empty, empty, empty
    cut = int(np.searchsorted(tables.q_prefix, k, side="left"))
    counts = tables.q[:cut + 1].copy()
    counts[cut] -= int(tables.q_prefix[cut]) - k
    node = np.repeat(np.arange(cut + 1), counts)
    starts = tables.q_prefix[:cut + 1] - tables.q[:cut + 1]
    offset = np.arange(k) - np.repeat(starts, counts)
    lcp_arr = (tables.sd - tables.q)[node] + offset + 1
    lb_arr = tables.lb[node]
    rb_arr = lb_arr + tables.f[node] - 1
    return lcp_arr, lb_arr, rb_arr


def tune_by_k(tables: TuningTables, k: int) -> tuple[int, int]:
    """(tau_K, L_K): the frequency floor and distinct-length count of the top-k set."""
    if k < 1 or k > tables.total_substrings:
        raise ValueError(
            f"k={k} outside [1, {tables.total_substrings}] distinct substrings"
        )
    i = int(np.searchsorted(tables.q_prefix, k, side="left"))
    return int(tables.f[i]), int(tables.l_prefix[i])


def tune_by_tau(tables: TuningTables, tau: int) -> tuple[int, int]:
    """(K_tau, L_tau): how many substrings occur >= tau times, and their length count."""
    if tau < 1:
        raise ValueError("tau must be positive")
    # f is sorted descending; count entries with f >= tau
    j = int(np.searchsorted(-tables.f, -tau, side="right"))
    if j == 0:
        return 0, 0
    return int(tables.q_prefix[j - 1]), int(tables.l_prefix[j - 1])

"""Enhanced suffix array: SA + LCP with pattern search and suffix-tree-style traversal.

The explicit suffix tree is never materialized; the bottom-up traversal over
the LCP array visits exactly the tree's internal nodes (one LCP interval
each), which is all that downstream mining needs.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from . import _sais
from .fingerprint import as_byte_array

_CACHE_MAGIC = b"USISALCP"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class SuffixArrayIndex:
    """Lexicographically sorted suffix starts plus adjacent-suffix LCP lengths."""

    sa: np.ndarray
    lcp: np.ndarray

    @property
    def n(self) -> int:
        return self.sa.size


@dataclass
class LcpInterval:
    """An SA range [lb, rb] whose suffixes share a prefix of length `lcp`."""

    lcp: int
    lb: int
    rb: int
    parent_lcp: int = 0
    child_list: list = field(default_factory=list)

    @property
    def frequency(self) -> int:
        return self.rb - self.lb + 1


def build_suffix_array(text) -> SuffixArrayIndex:
    """Build SA and LCP for a byte text (induced sorting + Kasai)."""
    data = as_byte_array(text)
    sa = _sais.suffix_array(data)
    lcp = _sais.lcp_kasai(data, sa)
    return SuffixArrayIndex(sa=sa, lcp=lcp)


def build_lcp(text, sa: np.ndarray) -> np.ndarray:
    """LCP array for a prebuilt suffix array."""
    return _sais.lcp_kasai(as_byte_array(text), np.asarray(sa, dtype=np.int32))


def pattern_interval(idx: SuffixArrayIndex, text: bytes, pattern: bytes):
    """SA interval (lb, rb) of all occurrences of `pattern`, or None.

    Two binary searches over the suffix array, O(m log n).
    """
    m = len(pattern)
    if m == 0:
        raise ValueError("empty pattern")
    sa = idx.sa
    n = sa.size
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) >> 1
        s = sa[mid]
        if text[s:s + m] < pattern:
            lo = mid + 1
        else:
            hi = mid
    if lo == n:
        return None
    s = sa[lo]
    if text[s:s + m] != pattern:
        return None
    lb = lo
    hi = n
    while lo < hi:
        mid = (lo + hi) >> 1
        s = sa[mid]
        if text[s:s + m] <= pattern:
            lo = mid + 1
        else:
            hi = mid
    return lb, lo - 1


def occurrence_positions(idx: SuffixArrayIndex, text: bytes, pattern: bytes) -> np.ndarray:
    """Start positions of all occurrences (unsorted, straight from the SA range)."""
    span = pattern_interval(idx, text, pattern)
    if span is None:
        return np.empty(0, dtype=idx.sa.dtype)
    lb, rb = span
    return idx.sa[lb:rb + 1]


def lcp_interval_arrays(lcp: np.ndarray):
    """All LCP intervals as parallel arrays (depth, lb, rb, parent_depth)."""
    return _sais.lcp_intervals(np.asarray(lcp, dtype=np.int32))


def bottom_up_lcp_intervals(idx: SuffixArrayIndex):
    """Yield every LCP interval exactly once, children before parents.

    Interval objects carry their child intervals, mirroring a bottom-up
    traversal of the (never materialized) suffix tree. The traversal order
    is the post-order emitted by the stack pass over the LCP array, so a
    node's children are exactly the unclaimed intervals nested inside it.
    """
    depth, lb, rb, parent = lcp_interval_arrays(idx.lcp)
    unclaimed: list[LcpInterval] = []
    for k in range(depth.size):
        node = LcpInterval(int(depth[k]), int(lb[k]), int(rb[k]), int(parent[k]))
        while unclaimed and unclaimed[-1].lb >= node.lb and unclaimed[-1].rb <= node.rb:
            node.child_list.append(unclaimed.pop())
        node.child_list.reverse()
        unclaimed.append(node)
        yield node


def leaf_parent_depths(lcp: np.ndarray) -> np.ndarray:
    """String depth of each SA leaf's parent node: max of its adjacent LCPs."""
    right = np.empty_like(lcp)
    right[:-1] = lcp[1:]
    right[-1] = 0
    return np.maximum(lcp, right)


# -- optional on-disk SA/LCP cache ----------------------------------------


def text_digest(text) -> str:
    return hashlib.blake2b(bytes(text), digest_size=16).hexdigest()


def cache_path(cache_dir: str, text) -> str:
    return os.path.join(cache_dir, text_digest(text) + ".salcp")


def save_suffix_cache(idx: SuffixArrayIndex, text, cache_dir: str) -> str:
    """Write sa/lcp as little-endian int64 arrays under a versioned header."""
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, text)
    with open(path + ".tmp", "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<QQ", _CACHE_VERSION, idx.n))
        fh.write(idx.sa.astype("<i8").tobytes())
        fh.write(idx.lcp.astype("<i8").tobytes())
    os.replace(path + ".tmp", path)
    return path


def load_suffix_cache(text, cache_dir: str) -> SuffixArrayIndex | None:
    """Load a cached index for this exact text, or None when absent/stale."""
    path = cache_path(cache_dir, text)
    if not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        head = fh.read(len(_CACHE_MAGIC) + 16)
        if head[:len(_CACHE_MAGIC)] != _CACHE_MAGIC:
            return None
        version, n = struct.unpack("<QQ", head[len(_CACHE_MAGIC):])
        if version != _CACHE_VERSION or n != len(text):
            return None
        sa = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int32)
        lcp = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int32)
    if sa.size != n or lcp.size != n:
        return None
    return SuffixArrayIndex(sa=sa, lcp=lcp)

"""Caching baselines and streaming-sketch top-K substring miners.

The four baselines answer every query with the exact suffix-array + prefix-sum
fallback; they differ only in what they cache: nothing (BSL1), the most
recently queried patterns (BSL2), the most frequently queried patterns
tracked exactly (BSL3) or through a count-min sketch (BSL4). The two sketch
miners adapt frequent-item machinery to substrings; both undercount and both
collapse on inputs whose frequent substrings are long.
"""

from __future__ import annotations

import random
from collections import OrderedDict

import numpy as np

from .fingerprint import Fingerprinter
from .index import fallback_utility
from .suffix import SuffixArrayIndex
from .weighted import PrefixUtilityArray, UtilitySpec

_MIX = 0x9E3779B97F4A7C15
_PRIME = (1 << 61) - 1


def _key_int(fp: int, length: int) -> int:
    return (fp * _MIX + length) & 0xFFFFFFFFFFFFFFFF


class IndexedMinHeap:
    """Min-heap over (count, key) with a key -> slot map for O(log n) updates."""

    def __init__(self):
        self._heap: list[tuple[int, object]] = []
        self._slot: dict = {}

    def __len__(self):
        return len(self._heap)

    def __contains__(self, key):
        return key in self._slot

    def min_count(self) -> int:
        return self._heap[0][0]

    def min_key(self):
        return self._heap[0][1]

    def count(self, key) -> int:
        return self._heap[self._slot[key]][0]

    def insert(self, key, count: int) -> None:
        self._heap.append((count, key))
        self._slot[key] = len(self._heap) - 1
        self._up(len(self._heap) - 1)

    def set_count(self, key, count: int) -> None:
        i = self._slot[key]
        old = self._heap[i][0]
        self._heap[i] = (count, key)
        if count > old:
            self._down(i)
        else:
            self._up(i)

    def pop_min(self):
        count, key = self._heap[0]
        last = self._heap.pop()
        del self._slot[key]
        if self._heap:
            self._heap[0] = last
            self._slot[last[1]] = 0
            self._down(0)
        return key, count

    def _up(self, i):
        heap, slot = self._heap, self._slot
        item = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            if heap[parent][0] <= item[0]:
                break
            heap[i] = heap[parent]
            slot[heap[i][1]] = i
            i = parent
        heap[i] = item
        slot[item[1]] = i

    def _down(self, i):
        heap, slot = self._heap, self._slot
        n = len(heap)
        item = heap[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and heap[child + 1][0] < heap[child][0]:
                child += 1
            if heap[child][0] >= item[0]:
                break
            heap[i] = heap[child]
            slot[heap[i][1]] = i
            i = child
        heap[i] = item
        slot[item[1]] = i


class QueryCache:
    """Bounded cache of query results with LRU or least-frequently-queried eviction."""

    def __init__(self, capacity: int, policy: str = "lru"):
        if policy not in ("lru", "lfq"):
            raise ValueError(f"unknown eviction policy {policy!r}")
        self.capacity = capacity
        self.policy = policy
        self._values: OrderedDict | dict = OrderedDict() if policy == "lru" else {}
        self._heap = IndexedMinHeap() if policy == "lfq" else None

    def __len__(self):
        return len(self._values)

    def get(self, key):
        if key not in self._values:
            return None
        if self.policy == "lru":
            self._values.move_to_end(key)
        else:
            self._heap.set_count(key, self._heap.count(key) + 1)
        return self._values[key]

    def put(self, key, value) -> None:
        if self.capacity < 1 or key in self._values:
            return
        if len(self._values) >= self.capacity:
            if self.policy == "lru":
                self._values.popitem(last=False)
            else:
                victim, _ = self._heap.pop_min()
                del self._values[victim]
        self._values[key] = value
        if self.policy == "lfq":
            self._heap.insert(key, 1)


class CountMinSketch:
    """d x w counter grid with pairwise-independent hashing; never undercounts."""

    def __init__(self, depth: int = 4, width: int = 1 << 16, seed: int = 1):
        rng = random.Random(seed)
        self.depth = depth
        self.width = width
        self._a = [rng.randrange(1, _PRIME) for _ in range(depth)]
        self._b = [rng.randrange(0, _PRIME) for _ in range(depth)]
        self.rows = [[0] * width for _ in range(depth)]

    def _cell(self, r: int, item: int) -> int:
        return ((self._a[r] * item + self._b[r]) % _PRIME) % self.width

    def update(self, item: int, amount: int = 1) -> None:
        for r in range(self.depth):
            self.rows[r][self._cell(r, item)] += amount

    def estimate(self, item: int) -> int:
        return min(self.rows[r][self._cell(r, item)] for r in range(self.depth))


# -- query baselines --------------------------------------------------------


def bsl1_query(text: bytes, idx: SuffixArrayIndex, psw: PrefixUtilityArray,
               spec: UtilitySpec, pattern: bytes) -> float | None:
    """No caching: always the suffix-array + prefix-sum path."""
    return fallback_utility(text, idx, psw, spec, pattern)


def cached_query(cache: QueryCache, text: bytes, idx: SuffixArrayIndex,
                 psw: PrefixUtilityArray, spec: UtilitySpec, pattern: bytes,
                 fpr: Fingerprinter) -> float | None:
    """Caching baseline (LRU or least-frequently-queried, per the cache policy)."""
    key = (fpr.fingerprint(pattern), len(pattern))
    hit = cache.get(key)
    if hit is not None:
        return hit[0]
    value = fallback_utility(text, idx, psw, spec, pattern)
    cache.put(key, (value,))
    return value


def bsl4_query(sketch: CountMinSketch, topset: dict, capacity: int, heap: IndexedMinHeap,
               text: bytes, idx: SuffixArrayIndex, psw: PrefixUtilityArray,
               spec: UtilitySpec, pattern: bytes, fpr: Fingerprinter) -> float | None:
    """Sketch-backed frequent-query cache: query counts live in the sketch only."""
    key = _key_int(fpr.fingerprint(pattern), len(pattern))
    sketch.update(key)
    est = sketch.estimate(key)
    if key in topset:
        if key in heap:
            heap.set_count(key, est)
        return topset[key]
    value = fallback_utility(text, idx, psw, spec, pattern)
    if len(topset) < capacity:
        topset[key] = value
        heap.insert(key, est)
    elif est > heap.min_count():
        victim, _ = heap.pop_min()
        del topset[victim]
        topset[key] = value
        heap.insert(key, est)
    return value


class Bsl1Engine:
    name = "bsl1"

    def __init__(self, text, idx, psw, spec):
        self.text, self.idx, self.psw, self.spec = text, idx, psw, spec

    def query(self, pattern: bytes) -> float | None:
        return bsl1_query(self.text, self.idx, self.psw, self.spec, pattern)

    def serialized_size(self) -> int:
        from .index import predicted_index_size_bytes
        return predicted_index_size_bytes(len(self.text), 0)


class CachedEngine(Bsl1Engine):
    def __init__(self, text, idx, psw, spec, capacity: int, policy: str):
        super().__init__(text, idx, psw, spec)
        self.name = "bsl2" if policy == "lru" else "bsl3"
        self.cache = QueryCache(capacity, policy)
        self.fpr = Fingerprinter()

    def query(self, pattern: bytes) -> float | None:
        return cached_query(self.cache, self.text, self.idx, self.psw, self.spec,
                            pattern, self.fpr)

    def serialized_size(self) -> int:
        from .index import predicted_index_size_bytes
        return predicted_index_size_bytes(len(self.text), len(self.cache))


class SketchCachedEngine(Bsl1Engine):
    name = "bsl4"

    def __init__(self, text, idx, psw, spec, capacity: int,
                 depth: int = 4, width: int = 1 << 16, seed: int = 1):
        super().__init__(text, idx, psw, spec)
        self.capacity = capacity
        self.sketch = CountMinSketch(depth, width, seed)
        self.topset: dict = {}
        self.heap = IndexedMinHeap()
        self.fpr = Fingerprinter()

    def query(self, pattern: bytes) -> float | None:
        return bsl4_query(self.sketch, self.topset, self.capacity, self.heap,
                          self.text, self.idx, self.psw, self.spec, pattern, self.fpr)

    def serialized_size(self) -> int:
        from .index import predicted_index_size_bytes
        return predicted_index_size_bytes(len(self.text), len(self.topset))


# -- sketch miners ------------------------------------------------------------


class Ssummary:
    """At most K tracked strings with counts; O(1) amortized min lookups.

    Each entry remembers the position that first admitted it, so callers can
    distinguish strings established before the current text position from
    ones inserted while processing it.
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._heap = IndexedMinHeap()
        self._strings: dict[int, tuple[bytes, int]] = {}

    def __len__(self):
        return len(self._strings)

    def __contains__(self, key: int):
        return key in self._strings

    def added_at(self, key: int) -> int:
        return self._strings[key][1]

    def min_count(self) -> int:
        return self._heap.min_count()

    def update(self, key: int, count: int) -> None:
        self._heap.set_count(key, count)

    def add(self, key: int, count: int, string: bytes, position: int) -> None:
        if len(self._strings) >= self.capacity:
            victim, _ = self._heap.pop_min()
            del self._strings[victim]
        self._strings[key] = (string, position)
        self._heap.insert(key, count)

    def items(self) -> list[tuple[bytes, int]]:
        return [(s, self._heap.count(k)) for k, (s, _) in self._strings.items()]


class _DecaySketch:
    """HeavyKeeper-style bucket sketch: (fingerprint, count) cells with
    probabilistic exponential decay on fingerprint collisions."""

    def __init__(self, depth: int, width: int, decay: float, rng: random.Random):
        self.depth = depth
        self.width = width
        self.rng = rng
        self._a = [rng.randrange(1, _PRIME) for _ in range(depth)]
        self._b = [rng.randrange(0, _PRIME) for _ in range(depth)]
        self.cell_fp = [[0] * width for _ in range(depth)]
        self.cell_ct = [[0] * width for _ in range(depth)]
        # decay^-count, flattened to 0 beyond where it cannot fire anyway
        self._decay_p = [decay ** -c for c in range(1, 512)]

    def offer(self, key: int) -> int:
        """Record one candidacy of `key`; return its estimated count."""
        best = 0
        rng = self.rng
        for r in range(self.depth):
            pos = ((self._a[r] * key + self._b[r]) % _PRIME) % self.width
            fps = self.cell_fp[r]
            cts = self.cell_ct[r]
            if cts[pos] == 0:
                fps[pos] = key
                cts[pos] = 1
                if best < 1:
                    best = 1
            elif fps[pos] == key:
                cts[pos] += 1
                if cts[pos] > best:
                    best = cts[pos]
            else:
                c = cts[pos]
                p = self._decay_p[c - 1] if c <= len(self._decay_p) else 0.0
                if p > 0.0 and rng.random() < p:
                    c -= 1
                    if c == 0:
                        fps[pos] = key
                        cts[pos] = 1
                        if best < 1:
                            best = 1
                    else:
                        cts[pos] = c
        return best


def substring_hk_mine(text: bytes, k: int, depth: int = 4, width: int = 1 << 16,
                      decay: float = 1.08, extension_base: float = 2.0,
                      seed: int = 1) -> list[tuple[bytes, int]]:
    """HeavyKeeper adapted from items to substrings.

    One left-to-right pass; at each position the single letter is offered,
    and the candidate is extended one letter at a time only while its prefix
    was already tracked before this position, with probability
    extension_base^-length. Expected O(1) offered candidates per position
    for extension_base > 1; long frequent substrings are reached with
    vanishing probability, which is exactly how this family of miners fails.
    """
    if extension_base <= 1.0:
        raise ValueError("extension base must exceed 1")
    if k < 1:
        raise ValueError("k must be positive")
    rng = random.Random(seed)
    sketch = _DecaySketch(depth, width, decay, rng)
    summary = Ssummary(k)
    fpr = Fingerprinter()
    base = fpr.base
    n = len(text)
    ext_p = [extension_base ** -l for l in range(1, 64)]

    for i in range(n):
        fp = 0
        length = 0
        while True:
            fp = (fp * base + text[i + length]) % _PRIME
            length += 1
            key = _key_int(fp, length)
            established = key in summary and summary.added_at(key) < i
            est = sketch.offer(key)
            if key in summary:
                summary.update(key, est)
            elif len(summary) < k or est > summary.min_count():
                summary.add(key, est, text[i:i + length], i)
            if i + length >= n or not established:
                break
            p = ext_p[length - 1] if length <= len(ext_p) else 0.0
            if p <= 0.0 or rng.random() >= p:
                break
    out = summary.items()
    out.sort(key=lambda kv: (-kv[1], len(kv[0]), kv[0]))
    return out


class MisraGriesTrie:
    """Trie of at most K counted nodes over processed positions.

    Each position walks its matched path (incrementing true-occurrence
    counters), then keeps appending one-letter extensions while nodes are
    free. Once the K-node budget blocks an extension, the blocked candidate
    is dropped and every counter is decremented (Misra-Gries overflow). The
    decrement is a lazy global offset, so a sweep is O(1) and counters are
    clamped at zero on their next touch. Counters only ever undercount; the
    node set itself never shrinks, which is the structural reason this
    adaptation loses long frequent substrings.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.root: dict = {}  # letter -> [stored_count, children-dict]
        self.size = 0
        self.offset = 0  # accumulated global decrements
        self.sweeps = 0

    def process(self, text: bytes, i: int) -> None:
        node = self.root
        n = len(text)
        depth = 0
        off = self.offset
        # matched walk: each visited node witnesses a true occurrence
        while i + depth < n:
            child = node.get(text[i + depth])
            if child is None:
                break
            stored = child[0]
            child[0] = (stored if stored > off else off) + 1
            node = child[1]
            depth += 1
        # extension walk: grow the path while the budget allows
        while i + depth < n:
            if self.size >= self.capacity:
                self.sweep()
                break
            child = [off + 1, {}]
            node[text[i + depth]] = child
            self.size += 1
            node = child[1]
            depth += 1

    def sweep(self) -> None:
        """Misra-Gries overflow: decrement every counter (lazily), drop the candidate."""
        self.offset += 1
        self.sweeps += 1

    def items(self) -> list[tuple[bytes, int]]:
        """All nodes with positive adjusted counts."""
        out: list[tuple[bytes, int]] = []
        off = self.offset
        stack = [(b"", self.root)]
        while stack:
            prefix, children = stack.pop()
            for letter, (stored, sub) in children.items():
                s = prefix + bytes([letter])
                if stored > off:
                    out.append((s, stored - off))
                stack.append((s, sub))
        return out


def topk_trie_mine(text: bytes, k: int) -> list[tuple[bytes, int]]:
    """Misra-Gries trie estimate of the top-k frequent substrings (O(k) nodes)."""
    trie = MisraGriesTrie(k)
    for i in range(len(text)):
        trie.process(text, i)
    out = trie.items()
    out.sort(key=lambda kv: (-kv[1], len(kv[0]), kv[0]))
    return out[:k]

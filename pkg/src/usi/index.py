"""The utility string index: precomputed global utilities for the top-K frequent
substrings behind a fingerprint-keyed table, with a suffix-array + prefix-sum
fallback for everything else.

Querying a stored pattern costs one fingerprint (O(m)); anything else costs a
suffix-array locate plus one O(1) prefix-sum difference per occurrence, and
occurrences of non-stored patterns are bounded by the mining frequency floor.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass

import numpy as np

from .fingerprint import Fingerprinter
from .suffix import SuffixArrayIndex, build_suffix_array, pattern_interval
from .topk_approx import SampledEntry
from .topk_exact import TopKTriple
from .weighted import (
    PrefixUtilityArray,
    UtilitySpec,
    WeightedText,
    build_prefix_utility,
)

MAGIC = b"USI1"
FORMAT_VERSION = 1

_MINER_TAGS = {"none": 0, "exact": 1, "approx": 2}
_MINER_NAMES = {v: k for k, v in _MINER_TAGS.items()}
_OP_TAGS = {"sum": 0, "min": 1, "max": 2, "avg": 3}
_OP_NAMES = {v: k for k, v in _OP_TAGS.items()}

_ENTRY_DTYPE = np.dtype([
    ("fp", "<u8"), ("length", "<u8"), ("count", "<u8"),
    ("witness", "<u8"), ("value", "<f8"),
])
_HEADER = struct.Struct("<QQQQQQQQQQ")


class FormatError(ValueError):
    """Corrupt or incompatible serialized index."""


class UtilityTable:
    """Utility entries keyed by (fingerprint, length).

    Each entry holds the aggregated utility, the occurrence count, and a
    witness occurrence used to confirm lookups against the text.
    """

    def __init__(self):
        self._entries: dict[tuple[int, int], tuple[float, int, int]] = {}

    def add(self, fp: int, length: int, value: float, count: int, witness: int) -> None:
        key = (fp, length)
        if key in self._entries:
            raise ValueError(f"duplicate substring entry for key {key}")
        self._entries[key] = (value, count, witness)

    def get(self, fp: int, length: int):
        return self._entries.get((fp, length))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.items())

    @property
    def min_count(self) -> int:
        return min((c for _, c, _ in self._entries.values()), default=0)

    def distinct_lengths(self) -> int:
        return len({length for _, length in self._entries})


@dataclass
class IndexMeta:
    k: int
    tau_k: int
    l_k: int
    miner: str = "none"
    s: int = 0


class UsiIndex:
    """Queryable index over one weighted text; immutable after construction."""

    def __init__(self, text: bytes, suffix: SuffixArrayIndex, psw: PrefixUtilityArray,
                 spec: UtilitySpec, fingerprinter: Fingerprinter,
                 table: UtilityTable, meta: IndexMeta, verify: bool = True):
        self.text = text
        self.suffix = suffix
        self.psw = psw
        self.spec = spec
        self.fingerprinter = fingerprinter
        self.table = table
        self.meta = meta
        self.verify = verify

    @property
    def n(self) -> int:
        return len(self.text)

    def query(self, pattern: bytes) -> float | None:
        """Global utility of `pattern`; the no-occurrence policy of the spec applies."""
        m = len(pattern)
        if m == 0:
            raise ValueError("empty pattern")
        entry = self.table.get(self.fingerprinter.fingerprint(pattern), m)
        if entry is not None:
            value, count, witness = entry
            if not self.verify or self.text[witness:witness + m] == pattern:
                if self.spec.global_op == "avg":
                    return value / count
                return value
        return fallback_utility(self.text, self.suffix, self.psw, self.spec, pattern)

    def serialized_size(self) -> int:
        """Exact byte size serialize() will produce."""
        n = self.n
        return len(MAGIC) + _HEADER.size + n + 8 * n + 8 * n + 8 * n \
            + _ENTRY_DTYPE.itemsize * len(self.table) + 8


def fallback_utility(text: bytes, suffix: SuffixArrayIndex, psw: PrefixUtilityArray,
                     spec: UtilitySpec, pattern: bytes) -> float | None:
    """Locate occurrences in the suffix array, aggregate their prefix-sum utilities."""
    m = len(pattern)
    if m == 0:
        raise ValueError("empty pattern")
    span = pattern_interval(suffix, text, pattern)
    if span is None:
        return spec.empty_result
    occ = suffix.sa[span[0]:span[1] + 1]
    return spec.aggregate(psw.fragments(occ, m))


def build_usi(wt: WeightedText, spec: UtilitySpec, triples,
              idx: SuffixArrayIndex | None = None,
              psw: PrefixUtilityArray | None = None,
              fpr: Fingerprinter | None = None,
              verify: bool = True, s: int = 0) -> UsiIndex:
    """Assemble the index from mined substrings.

    `triples` is the exact miner's TopKTriple list, the approximate miner's
    SampledEntry list, or empty for a fallback-only index. Approximate
    entries are located in the suffix array first, so stored utilities are
    exact either way. Construction groups entries by length and aggregates
    each substring's occurrences with vectorized prefix-sum differences.
    """
    if idx is None:
        idx = build_suffix_array(wt.text)
    if psw is None:
        psw = build_prefix_utility(wt, spec)
    if fpr is None:
        fpr = Fingerprinter()

    miner = "none"
    if triples:
        if isinstance(triples[0], SampledEntry):
            miner = "approx"
            triples = _entries_to_triples(wt.text, idx, triples)
        else:
            miner = "exact"

    table = UtilityTable()
    if triples:
        _populate_table(wt.text, idx, psw, spec, fpr, triples, table)

    counts = [c for _, (_, c, _) in table]
    meta = IndexMeta(
        k=len(table),
        tau_k=min(counts) if counts else 0,
        l_k=table.distinct_lengths(),
        miner=miner,
        s=s,
    )
    return UsiIndex(wt.text, idx, psw, spec, fpr, table, meta, verify=verify)


def _entries_to_triples(text: bytes, idx: SuffixArrayIndex,
                        entries: list[SampledEntry]) -> list[TopKTriple]:
    out = []
    for e in entries:
        span = pattern_interval(idx, text, text[e.j:e.j + e.length])
        if span is None:
            raise ValueError(f"witness substring at {e.j} not found in text")
        out.append(TopKTriple(e.length, span[0], span[1]))
    return out


def _populate_table(text, idx, psw, spec, fpr, triples, table,
                    chunk_occurrences: int = 1 << 23) -> None:
    lcp = np.array([t.lcp for t in triples], np.int64)
    lb = np.array([t.lb for t in triples], np.int64)
    rb = np.array([t.rb for t in triples], np.int64)
    if np.any(lcp < 1) or np.any(lb < 0) or np.any(rb >= idx.n) or np.any(lb > rb):
        raise ValueError("triple out of range")
    f = rb - lb + 1
    wit = idx.sa[lb].astype(np.int64)
    if np.any(wit + lcp > len(text)):
        raise ValueError("triple out of range")
    values = np.empty(lcp.size, np.float64)

    reduce_op = {"sum": np.add, "avg": np.add, "min": np.minimum, "max": np.maximum}
    op = reduce_op[spec.global_op]
    bounds = np.concatenate([[0], np.cumsum(f)])
    start = 0
    while start < lcp.size:
        stop = int(np.searchsorted(bounds, bounds[start] + chunk_occurrences, "left"))
        stop = max(start + 1, min(stop, lcp.size))
        sel = slice(start, stop)
        counts = f[sel]
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        occ = idx.sa[np.repeat(lb[sel], counts) + offs].astype(np.int64)
        vals = psw.fragments_varlen(occ, np.repeat(lcp[sel], counts))
        values[sel] = op.reduceat(vals, np.cumsum(counts) - counts)
        start = stop

    for i in range(lcp.size):
        w = int(wit[i])
        length = int(lcp[i])
        fp = fpr.fingerprint(text[w:w + length])
        table.add(fp, length, float(values[i]), int(f[i]), w)


# -- serialization ----------------------------------------------------------


class _HashingWriter:
    def __init__(self, fh):
        self.fh = fh
        self.hasher = hashlib.blake2b(digest_size=8)
        self.written = 0

    def write(self, data: bytes) -> None:
        self.fh.write(data)
        self.hasher.update(data)
        self.written += len(data)


def serialize(index: UsiIndex, sink) -> int:
    """Write the index; returns the byte count. `sink` is a path or binary file."""
    if hasattr(sink, "write"):
        return _serialize_to(index, sink)
    with open(sink, "wb") as fh:
        return _serialize_to(index, fh)


def _serialize_to(index: UsiIndex, fh) -> int:
    out = _HashingWriter(fh)
    n = index.n
    entries = np.empty(len(index.table), _ENTRY_DTYPE)
    for i, ((fp, length), (value, count, witness)) in enumerate(
        sorted(index.table, key=lambda kv: (kv[0][1], kv[0][0]))
    ):
        entries[i] = (fp, length, count, witness, value)

    out.write(MAGIC)
    out.write(_HEADER.pack(
        FORMAT_VERSION, n, len(entries), index.meta.tau_k, index.meta.l_k,
        _MINER_TAGS[index.meta.miner], index.meta.s, index.fingerprinter.base,
        _OP_TAGS[index.spec.global_op], 1 if index.verify else 0,
    ))
    out.write(index.text)
    out.write(index.suffix.sa.astype("<i8").tobytes())
    out.write(index.suffix.lcp.astype("<i8").tobytes())
    out.write(index.psw.psw.astype("<f8").tobytes())
    out.write(entries.tobytes())
    digest = out.hasher.digest()
    fh.write(digest)
    return out.written + len(digest)


def deserialize(source) -> UsiIndex:
    """Read an index written by serialize(); verifies magic, version and checksum."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    if len(data) < len(MAGIC) + _HEADER.size + 8:
        raise FormatError("truncated index file")
    if data[:len(MAGIC)] != MAGIC:
        raise FormatError("bad magic; not an index file")
    digest = hashlib.blake2b(data[:-8], digest_size=8).digest()
    if digest != data[-8:]:
        raise FormatError("checksum mismatch")
    off = len(MAGIC)
    (version, n, n_entries, tau_k, l_k, miner_tag, s, base, op_tag, verify
     ) = _HEADER.unpack_from(data, off)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    off += _HEADER.size
    need = off + n + 8 * n * 3 + _ENTRY_DTYPE.itemsize * n_entries + 8
    if len(data) != need:
        raise FormatError(f"wrong payload size: {len(data)} != {need}")

    text = bytes(data[off:off + n]); off += n
    sa = np.frombuffer(data, "<i8", n, off).astype(np.int32); off += 8 * n
    lcp = np.frombuffer(data, "<i8", n, off).astype(np.int32); off += 8 * n
    psw = np.frombuffer(data, "<f8", n, off).copy(); off += 8 * n
    entries = np.frombuffer(data, _ENTRY_DTYPE, n_entries, off)

    spec = UtilitySpec(global_op=_OP_NAMES[int(op_tag)])
    fpr = Fingerprinter(base=int(base))
    table = UtilityTable()
    for e in entries:
        table.add(int(e["fp"]), int(e["length"]), float(e["value"]),
                  int(e["count"]), int(e["witness"]))
    meta = IndexMeta(k=int(n_entries), tau_k=int(tau_k), l_k=int(l_k),
                     miner=_MINER_NAMES[int(miner_tag)], s=int(s))
    return UsiIndex(
        text, SuffixArrayIndex(sa=sa, lcp=lcp), PrefixUtilityArray(psw),
        spec, fpr, table, meta, verify=bool(verify),
    )


def predicted_index_size_bytes(n: int, k: int) -> int:
    """Size a not-yet-built index from its text length and entry count."""
    return len(MAGIC) + _HEADER.size + n + 8 * n * 3 + _ENTRY_DTYPE.itemsize * k + 8

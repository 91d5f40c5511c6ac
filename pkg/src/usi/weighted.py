"""Weighted texts and utility aggregation.

A weighted text pairs a byte string with one real utility per position. The
local utility of a fragment aggregates the weights it covers; the global
utility of a pattern aggregates the local utilities of all its occurrences.
`global_utility_bruteforce` is the reference semantics every indexed query
path in this package is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GLOBAL_OPS = ("sum", "min", "max", "avg")


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class WeightedText:
    """A byte text with a per-position utility array of the same length."""

    text: bytes
    weights: np.ndarray

    def __post_init__(self):
        if len(self.text) == 0:
            raise DataError("empty text")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size != len(self.text):
            raise DataError(
                f"length mismatch: {len(self.text)} text bytes, {w.size} weights"
            )
        if not np.all(np.isfinite(w)):
            raise DataError("weights must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.text)

    @property
    def alphabet_size(self) -> int:
        return len(set(self.text))


@dataclass(frozen=True)
class UtilitySpec:
    """Choice of local/global aggregators plus the zero-occurrence policy.

    The local operator must admit the sliding-window property (any of
    u(B·C), u(B), u(C) derivable from the other two in O(1)); of the stock
    operators only sum qualifies, so sum is the only local choice. The
    global operator aggregates per-occurrence local utilities in one pass.
    Patterns with no occurrences yield `empty_result`: 0.0 for sum/avg,
    None (an explicit no-occurrence signal) for min/max.
    """

    local_op: str = "sum"
    global_op: str = "sum"
    empty_result: float | None = field(default=None)

    def __post_init__(self):
        if self.local_op != "sum":
            raise ValueError(
                f"local operator {self.local_op!r} lacks the sliding-window property"
            )
        if self.global_op not in GLOBAL_OPS:
            raise ValueError(f"unknown global operator {self.global_op!r}")
        if self.empty_result is None and self.global_op in ("sum", "avg"):
            object.__setattr__(self, "empty_result", 0.0)

    def aggregate(self, values: np.ndarray) -> float | None:
        """Reduce the local utilities of all occurrences to the global utility."""
        if len(values) == 0:
            return self.empty_result
        if self.global_op == "sum":
            return float(np.sum(values))
        if self.global_op == "avg":
            return float(np.mean(values))
        if self.global_op == "min":
            return float(np.min(values))
        return float(np.max(values))

    @property
    def tag(self) -> str:
        return f"{self.global_op}_of_{self.local_op}s"

    @classmethod
    def from_tag(cls, tag: str) -> "UtilitySpec":
        global_op, _, rest = tag.partition("_of_")
        return cls(local_op=rest.rstrip("s") or "sum", global_op=global_op)


class PrefixUtilityArray:
    """Prefix-aggregated local utilities: psw[i] = u(0, i+1).

    The virtual entry psw[-1] is the aggregator identity (0 for sum), so
    u(i, l) = psw[i+l-1] - psw[i-1] needs no special case at position 0.
    """

    def __init__(self, psw: np.ndarray):
        psw = np.asarray(psw, dtype=np.float64)
        # _ext[i] = u(0, i); one leading identity cell for O(1) fragment lookups
        self._ext = np.concatenate(([0.0], psw))
        self._ext.setflags(write=False)

    @property
    def psw(self) -> np.ndarray:
        return self._ext[1:]

    @property
    def n(self) -> int:
        return self._ext.size - 1

    def fragment(self, i: int, length: int) -> float:
        return float(self._ext[i + length] - self._ext[i])

    def fragments(self, starts: np.ndarray, length: int) -> np.ndarray:
        """Vectorized local utilities of equal-length fragments."""
        return self._ext[starts + length] - self._ext[starts]

    def fragments_varlen(self, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Vectorized local utilities of fragments with per-element lengths."""
        return self._ext[starts + lengths] - self._ext[starts]


def build_prefix_utility(wt: WeightedText, spec: UtilitySpec) -> PrefixUtilityArray:
    """One pass over the weights; requires the (invertible) sum local operator."""
    if spec.local_op != "sum":
        raise ValueError("prefix aggregation requires an invertible local operator")
    return PrefixUtilityArray(np.cumsum(wt.weights))


def local_utility(psw: PrefixUtilityArray, i: int, length: int) -> float:
    """Local utility of the fragment [i, i+length) in O(1)."""
    if length < 1 or i < 0 or i + length > psw.n:
        raise IndexError(f"fragment ({i}, {length}) out of range for n={psw.n}")
    return psw.fragment(i, length)


def find_occurrences(text: bytes, pattern: bytes) -> list[int]:
    """All (overlapping) match positions of `pattern`, by scanning the text."""
    out = []
    i = text.find(pattern)
    while i != -1:
        out.append(i)
        i = text.find(pattern, i + 1)
    return out


def global_utility_bruteforce(
    wt: WeightedText, spec: UtilitySpec, pattern: bytes
) -> float | None:
    """Reference global utility: test every position, aggregate matching fragments.

    Deliberately avoids the prefix array so it can serve as an independent
    oracle for every indexed query path.
    """
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    m = len(pattern)
    locals_ = [
        float(np.sum(wt.weights[i:i + m])) for i in find_occurrences(wt.text, pattern)
    ]
    return spec.aggregate(np.asarray(locals_))


def load_weighted_text(text_source, weights_source, weight_format: str = "binary") -> WeightedText:
    """Read a raw-byte text file and its weights file into a validated WeightedText.

    `weight_format` is "binary" (little-endian float64, exactly n values) or
    "text" (one decimal per line).
    """
    text = _read_bytes(text_source)
    raw = _read_bytes(weights_source)
    if weight_format == "binary":
        if len(raw) % 8 != 0:
            raise DataError(
                f"binary weights must be little-endian float64: {len(raw)} bytes"
            )
        weights = np.frombuffer(raw, dtype="<f8")
    elif weight_format == "text":
        try:
            weights = np.array(
                [float(line) for line in raw.decode("ascii").split()], dtype=np.float64
            )
        except ValueError as exc:
            raise DataError(f"bad weight value: {exc}") from exc
    else:
        raise ValueError(f"unknown weight format {weight_format!r}")
    return WeightedText(text, weights)


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if hasattr(source, "read"):
        return source.read()
    with open(source, "rb") as fh:
        return fh.read()

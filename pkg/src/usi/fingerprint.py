"""Karp-Rabin rolling fingerprints over byte strings, modulo the Mersenne prime 2^61 - 1."""

from __future__ import annotations

import random

import numpy as np
from numba import njit

MODULUS = (1 << 61) - 1
DEFAULT_SEED = 0x5EED_CAFE

_M61 = np.uint64(MODULUS)
_MASK29 = np.uint64((1 << 29) - 1)
_MASK32 = np.uint64((1 << 32) - 1)

# Patterns at least this long are fingerprinted with vectorized numpy math.
_VECTOR_CUTOFF = 64
# Per-chunk length bound keeping the 53-bit partial sums below 2^63.
_CHUNK = 4096


@njit(cache=True, inline="always")
def _mulmod(a, b):
    # (a * b) mod (2^61 - 1) without 128-bit arithmetic: split both factors
    # into 32-bit halves; 2^64 = 8 and 2^61 = 1 modulo the prime.
    ah = a >> np.uint64(32)
    al = a & _MASK32
    bh = b >> np.uint64(32)
    bl = b & _MASK32
    x = ah * bh * np.uint64(8)
    m = ah * bl + al * bh
    x += (m >> np.uint64(29)) + ((m & _MASK29) << np.uint64(32))
    ll = al * bl
    x += (ll & _M61) + (ll >> np.uint64(61))
    x = (x & _M61) + (x >> np.uint64(61))
    if x >= _M61:
        x -= _M61
    return x


@njit(cache=True)
def _prefix_scan(data, base):
    n = data.size
    out = np.empty(n + 1, np.uint64)
    out[0] = 0
    cur = np.uint64(0)
    for i in range(n):
        cur = _mulmod(cur, base)
        cur += np.uint64(data[i])
        if cur >= _M61:
            cur -= _M61
        out[i + 1] = cur
    return out


def _mulmod_vec(a: np.ndarray, b: int) -> np.ndarray:
    """Vectorized (a * b) mod (2^61 - 1) for a uint64 array and scalar b < 2^61."""
    a = a.astype(np.uint64, copy=False)
    bh = np.uint64(b >> 32)
    bl = np.uint64(b & 0xFFFFFFFF)
    ah = a >> np.uint64(32)
    al = a & _MASK32
    x = ah * bh * np.uint64(8)
    m = ah * bl + al * bh
    x += (m >> np.uint64(29)) + ((m & _MASK29) << np.uint64(32))
    ll = al * bl
    x += (ll & _M61) + (ll >> np.uint64(61))
    x = (x & _M61) + (x >> np.uint64(61))
    return np.where(x >= _M61, x - _M61, x)


def as_byte_array(data) -> np.ndarray:
    """View bytes-like or uint8-array input as a uint8 numpy array (no copy when possible)."""
    if isinstance(data, np.ndarray):
        if data.dtype != np.uint8:
            raise TypeError(f"expected uint8 array, got {data.dtype}")
        return data
    return np.frombuffer(data, dtype=np.uint8)


class Fingerprinter:
    """Rolling hash with a seeded random base and optional per-text prefix table.

    Equal byte sequences always map to equal fingerprints under a fixed
    (modulus, base); distinct substrings of one text collide with probability
    about n^2 / 2^61.
    """

    def __init__(self, seed: int = DEFAULT_SEED, base: int | None = None):
        self.modulus = MODULUS
        self.seed = seed
        if base is None:
            base = random.Random(seed).randrange(2, MODULUS - 1)
        if not (2 <= base <= MODULUS - 2):
            raise ValueError("base out of range")
        self.base = base
        self._pow = [1, base]
        self._prefix: np.ndarray | None = None

    # -- powers ----------------------------------------------------------

    def power(self, k: int) -> int:
        """base^k mod p, cached."""
        p = self._pow
        while len(p) <= k:
            p.append(p[-1] * self.base % MODULUS)
        return p[k]

    def _power_halves(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        self.power(k)
        arr = np.array(self._pow[:k], dtype=np.uint64)
        return arr >> np.uint64(32), arr & _MASK32

    # -- fingerprints ----------------------------------------------------

    def fingerprint(self, data) -> int:
        """Fingerprint of a byte sequence; the empty sequence maps to 0."""
        m = len(data)
        if m == 0:
            return 0
        if m < _VECTOR_CUTOFF:
            fp = 0
            base = self.base
            if isinstance(data, np.ndarray):
                data = data.tobytes()
            for b in data:
                fp = (fp * base + b) % MODULUS
            return fp
        return self._fingerprint_long(as_byte_array(data))

    def _fingerprint_long(self, arr: np.ndarray) -> int:
        fp = 0
        for off in range(0, arr.size, _CHUNK):
            chunk = arr[off:off + _CHUNK].astype(np.uint64)
            k = chunk.size
            ph, pl = self._power_halves(k)
            # chunk values < 2^8 and k <= 2^12 keep both sums below 2^63.
            hi = int(np.sum(chunk * ph[::-1]))
            lo = int(np.sum(chunk * pl[::-1]))
            fp = (fp * self.power(k) + (hi << 32) + lo) % MODULUS
        return fp

    def extend(self, fp: int, byte: int) -> int:
        """Fingerprint of A+b given the fingerprint of A."""
        return (fp * self.base + byte) % MODULUS

    def roll(self, fp: int, outgoing: int, incoming: int, length: int) -> int:
        """Slide a length-`length` window one position right in O(1)."""
        return ((fp - outgoing * self.power(length - 1)) * self.base + incoming) % MODULUS

    # -- per-text prefix table -------------------------------------------

    def index_text(self, text) -> None:
        """Build the prefix fingerprint table for `text`, enabling substring_fp."""
        self._prefix = _prefix_scan(as_byte_array(text), np.uint64(self.base))

    @property
    def prefix_table(self) -> np.ndarray | None:
        return self._prefix

    def substring_fp(self, i: int, length: int) -> int:
        """fp(text[i : i+length]) from the prefix table in O(1)."""
        pre = self._prefix
        if pre is None:
            raise RuntimeError("index_text() has not been called")
        return (int(pre[i + length]) - int(pre[i]) * self.power(length)) % MODULUS

    def substring_fp_many(self, starts: np.ndarray, length: int) -> np.ndarray:
        """Vectorized fingerprints of text[s : s+length] for every s in `starts`."""
        pre = self._prefix
        if pre is None:
            raise RuntimeError("index_text() has not been called")
        hi = pre[starts + length]
        scaled = _mulmod_vec(pre[starts], self.power(length))
        return np.where(hi >= scaled, hi - scaled, hi + _M61 - scaled)

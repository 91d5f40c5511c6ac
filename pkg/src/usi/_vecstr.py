"""Vectorized lexicographic ordering and common-prefix lengths for text fragments.

Fragments are compared through packed keys: 7 consecutive bytes per uint64,
9 bits each, biased by +1 so that running past a fragment's end packs as 0
and a proper prefix sorts before every extension. All routines touch only
O(#fragments)-sized scratch, never O(text).
"""

from __future__ import annotations

import numpy as np

_SPAN = 7  # bytes resolved per packed key


def pack_keys(data: np.ndarray, starts: np.ndarray, depth: int, lens: np.ndarray) -> np.ndarray:
    """uint64 keys of bytes [7*depth, 7*depth+7) of each fragment, end-padded with 0."""
    nmax = data.size - 1
    keys = np.zeros(starts.size, np.uint64)
    for j in range(_SPAN):
        off = _SPAN * depth + j
        idx = starts + off
        np.minimum(idx, nmax, out=idx)
        v = data[idx].astype(np.uint64)
        v += 1
        v[off >= lens] = 0
        keys = (keys << np.uint64(9)) | v
    return keys


def lex_order(data: np.ndarray, starts: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Indices ordering the fragments (starts[i], lens[i]) lexicographically.

    Equal fragments keep their input order (stable). Each round refines only
    the still-tied runs, so the cost is driven by the length of shared
    prefixes actually present, not by the maximum fragment length.
    """
    t = starts.size
    if t == 0:
        return np.empty(0, np.int64)
    starts = starts.astype(np.int64, copy=False)
    lens = lens.astype(np.int64, copy=False)

    keys = pack_keys(data, starts, 0, lens)
    order = np.argsort(keys, kind="stable")
    bound = np.empty(t, bool)
    bound[0] = True
    sk = keys[order]
    np.not_equal(sk[1:], sk[:-1], out=bound[1:])

    depth = 1
    while True:
        run_starts = np.flatnonzero(bound)
        run_sizes = np.diff(np.append(run_starts, t))
        multi = run_sizes > 1
        if not multi.any():
            break
        slot = np.repeat(multi, run_sizes)
        positions = np.flatnonzero(slot)
        elem = order[positions]
        # runs whose fragments are all exhausted are equal; leave them stable
        run_of = np.repeat(np.arange(multi.sum()), run_sizes[multi])
        live = np.bincount(run_of, weights=lens[elem] > depth * _SPAN) > 0
        keep = live[run_of]
        if not keep.any():
            break
        positions = positions[keep]
        elem = elem[keep]
        run_of = run_of[keep]

        k = pack_keys(data, starts[elem], depth, lens[elem])
        sub = np.lexsort((k, run_of))
        elem = elem[sub]
        ks = k[sub]
        order[positions] = elem
        newb = np.zeros(ks.size, bool)
        same_run = run_of[sub][1:] == run_of[sub][:-1]
        newb[1:] = (ks[1:] != ks[:-1]) & same_run
        bound[positions] |= newb
        depth += 1
    return order


def pair_lce(data: np.ndarray, a: np.ndarray, b: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """Length of the longest common prefix of fragments at a[i] and b[i], capped."""
    m = a.size
    a = a.astype(np.int64, copy=False)
    b = b.astype(np.int64, copy=False)
    caps = caps.astype(np.int64, copy=False)
    lce = np.zeros(m, np.int64)
    active = np.flatnonzero(caps > 0)
    depth = 0
    while active.size:
        ka = pack_keys(data, a[active], depth, caps[active])
        kb = pack_keys(data, b[active], depth, caps[active])
        eq = ka == kb
        adv = active[eq]
        lce[adv] += _SPAN
        neq = active[~eq]
        if neq.size:
            x = ka[~eq] ^ kb[~eq]
            add = np.zeros(neq.size, np.int64)
            undecided = np.ones(neq.size, bool)
            for g in range(_SPAN):
                nib = (x >> np.uint64(9 * (_SPAN - 1 - g))) & np.uint64(0x1FF)
                hit = undecided & (nib != 0)
                add[hit] = g
                undecided &= ~hit
            lce[neq] += add
        active = adv[caps[adv] > (depth + 1) * _SPAN]
        depth += 1
    return np.minimum(lce, caps)


def lce_bytes(text: bytes, i: int, j: int) -> int:
    """Scalar longest-common-extension of the suffixes at i and j by direct comparison."""
    n = len(text)
    if i == j:
        return n - i
    length = 0
    step = 128
    while True:
        a = text[i + length:i + length + step]
        b = text[j + length:j + length + step]
        if a == b:
            length += len(a)
            if len(a) < step:
                return length
            if step < (1 << 20):
                step <<= 1
        else:
            k = 0
            stop = min(len(a), len(b))
            while k < stop and a[k] == b[k]:
                k += 1
            return length + k

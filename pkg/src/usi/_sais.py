"""Suffix array construction by induced sorting (SA-IS) and Kasai's LCP algorithm.

The per-level kernels (type classification, induced sorting, LMS naming) are
numba-compiled; the recursion over reduced strings is a thin Python driver.
A sentinel symbol smaller than the whole alphabet is appended internally, so
callers pass plain byte arrays and receive the sentinel-free suffix array.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _classify(T):
    # stype[i] = 1 when suffix i is S-type (smaller than suffix i+1)
    n = T.size
    st = np.zeros(n, np.uint8)
    st[n - 1] = 1
    for i in range(n - 2, -1, -1):
        if T[i] < T[i + 1] or (T[i] == T[i + 1] and st[i + 1] == 1):
            st[i] = 1
    return st


@njit(cache=True)
def _bucket_counts(T, sigma):
    counts = np.zeros(sigma, np.int64)
    for i in range(T.size):
        counts[T[i]] += 1
    return counts


@njit(cache=True)
def _place_lms_tails(T, SA, order, counts):
    SA[:] = -1
    tails = np.empty(counts.size, np.int64)
    s = 0
    for a in range(counts.size):
        s += counts[a]
        tails[a] = s
    for k in range(order.size - 1, -1, -1):
        p = order[k]
        c = T[p]
        tails[c] -= 1
        SA[tails[c]] = p


@njit(cache=True)
def _induce(T, SA, st, counts):
    # L-type pass, left to right from bucket heads
    heads = np.empty(counts.size, np.int64)
    s = 0
    for a in range(counts.size):
        heads[a] = s
        s += counts[a]
    for i in range(SA.size):
        j = SA[i] - 1
        if SA[i] > 0 and st[j] == 0:
            c = T[j]
            SA[heads[c]] = j
            heads[c] += 1
    # S-type pass, right to left from bucket tails
    tails = np.empty(counts.size, np.int64)
    s = 0
    for a in range(counts.size):
        s += counts[a]
        tails[a] = s
    for i in range(SA.size - 1, -1, -1):
        j = SA[i] - 1
        if SA[i] > 0 and st[j] == 1:
            c = T[j]
            tails[c] -= 1
            SA[tails[c]] = j


@njit(cache=True)
def _lms_equal(T, lms_flag, a, b):
    # Compare the LMS substrings (LMS position up to and including the next
    # LMS position) starting at a and b. Neither argument is the sentinel
    # position here: its symbol is unique, so the first comparison differs.
    if T[a] != T[b]:
        return False
    i = 1
    while True:
        a_lms = lms_flag[a + i] == 1
        b_lms = lms_flag[b + i] == 1
        if a_lms and b_lms:
            return True
        if a_lms != b_lms:
            return False
        if T[a + i] != T[b + i]:
            return False
        i += 1


@njit(cache=True)
def _name_lms(T, SA, lms_flag, name_by_pos):
    prev = -1
    cur = -1
    for i in range(SA.size):
        p = SA[i]
        if p > 0 and lms_flag[p] == 1:
            if prev < 0 or not _lms_equal(T, lms_flag, prev, p):
                cur += 1
            name_by_pos[p] = cur
            prev = p
    return cur + 1


def _sais(T: np.ndarray, sigma: int) -> np.ndarray:
    """SA of an int32 string whose last symbol is the unique minimum."""
    n = T.size
    if n == 1:
        return np.zeros(1, np.int32)
    st = _classify(T)
    lms_flag = np.zeros(n, np.uint8)
    lms_flag[1:] = (st[1:] == 1) & (st[:-1] == 0)
    lms = np.flatnonzero(lms_flag).astype(np.int32)
    counts = _bucket_counts(T, sigma)
    SA = np.empty(n, np.int32)

    # First round: place LMS suffixes in text order, induce; this sorts the
    # LMS substrings even though the LMS suffixes themselves may still tie.
    _place_lms_tails(T, SA, lms, counts)
    _induce(T, SA, st, counts)

    name_by_pos = np.empty(n, np.int32)
    num_names = _name_lms(T, SA, lms_flag, name_by_pos)
    names = name_by_pos[lms]
    if num_names < lms.size:
        sub = _sais(names.astype(np.int32), num_names)
        order = lms[sub]
    else:
        order = np.empty(lms.size, np.int32)
        order[names] = lms

    _place_lms_tails(T, SA, order, counts)
    _induce(T, SA, st, counts)
    return SA


def suffix_array(data: np.ndarray) -> np.ndarray:
    """Suffix array (int32) of a uint8 array, no sentinel in the result."""
    n = data.size
    if n == 0:
        raise ValueError("empty input")
    T = np.empty(n + 1, np.int32)
    T[:n] = data
    T[:n] += 1
    T[n] = 0
    sa = _sais(T, 257)
    return sa[1:].copy()


@njit(cache=True)
def lcp_kasai(data, sa):
    """LCP array from the text and suffix array; lcp[0] = 0."""
    n = sa.size
    rank = np.empty(n, np.int32)
    for i in range(n):
        rank[sa[i]] = i
    lcp = np.zeros(n, np.int32)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and data[i + h] == data[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp


@njit(cache=True)
def lcp_intervals(lcp):
    """Every LCP interval of the array, children emitted before parents.

    Returns parallel int32 arrays (depth, lb, rb, parent_depth); the root
    0-interval is omitted. Single stack pass, O(n).
    """
    n = lcp.size
    out_d = np.empty(n, np.int32)
    out_lb = np.empty(n, np.int32)
    out_rb = np.empty(n, np.int32)
    out_pd = np.empty(n, np.int32)
    m = 0
    stack_d = np.empty(n + 2, np.int32)
    stack_b = np.empty(n + 2, np.int32)
    # barrier below the root keeps the final flush from underflowing the stack
    stack_d[0] = -1
    stack_b[0] = 0
    stack_d[1] = 0
    stack_b[1] = 0
    top = 1
    for i in range(1, n + 1):
        cur = lcp[i] if i < n else -1
        lb = i - 1
        while cur < stack_d[top]:
            d = stack_d[top]
            b = stack_b[top]
            top -= 1
            if d > 0:
                parent = stack_d[top] if stack_d[top] > cur else cur
                if parent < 0:
                    parent = 0
                out_d[m] = d
                out_lb[m] = b
                out_rb[m] = i - 1
                out_pd[m] = parent
                m += 1
            lb = b
        if cur > stack_d[top]:
            top += 1
            stack_d[top] = cur
            stack_b[top] = lb
    return out_d[:m].copy(), out_lb[:m].copy(), out_rb[:m].copy(), out_pd[:m].copy()

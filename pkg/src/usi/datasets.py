"""Synthetic corpora and sample data for demos, benchmarks and acceptance runs.

The word corpus mimics natural language at the statistics that matter here:
a Zipf-distributed vocabulary gives a heavy head of frequent substrings with
realistic length spread, and sentence punctuation breaks up long repeats.
Utilities are drawn uniformly from {0.70, 0.75, ..., 1.00}, the convention
used for datasets that ship without real per-position scores.
"""

from __future__ import annotations

import os

import numpy as np

from .weighted import WeightedText

_DEMO_TEXT = b"ATACCCCGATAATACCCCAG"
_DEMO_WEIGHTS = (0.9, 1, 3, 2, 0.7, 1, 1, 0.6, 0.5, 0.5,
                 0.5, 0.8, 1, 1, 1, 0.9, 1, 1, 0.8, 1)


def demo_weighted_text() -> WeightedText:
    """The small DNA-flavored weighted text used across demos and tests."""
    return WeightedText(_DEMO_TEXT, np.array(_DEMO_WEIGHTS))


def zipf_word_text(n_bytes: int, seed: int = 0, vocab: int = 30000,
                   alpha: float = 1.07) -> bytes:
    """Deterministic word-salad text of exactly n_bytes."""
    rng = np.random.default_rng(seed)
    lengths = rng.integers(2, 11, vocab)
    words = []
    for length in lengths:
        letters = rng.integers(97, 123, int(length), dtype=np.uint8)
        words.append(letters.tobytes())

    ranks = np.arange(1, vocab + 1, dtype=np.float64)
    cdf = np.cumsum(ranks ** -alpha)
    cdf /= cdf[-1]

    mean_token = float(lengths.mean()) + 1.0
    parts: list[bytes] = []
    total = 0
    sentence_left = int(rng.integers(6, 19))
    block = max(1024, int(n_bytes / mean_token / 8))
    while total < n_bytes:
        ids = np.searchsorted(cdf, rng.random(block))
        for wid in ids:
            w = words[wid]
            sentence_left -= 1
            if sentence_left <= 0:
                parts.append(w + b". ")
                total += len(w) + 2
                sentence_left = int(rng.integers(6, 19))
            else:
                parts.append(w + b" ")
                total += len(w) + 1
            if total >= n_bytes:
                break
    return b"".join(parts)[:n_bytes]


def grid_weights(n: int, seed: int = 0) -> np.ndarray:
    """n utilities drawn uniformly from the grid {0.70, 0.75, ..., 1.00}."""
    rng = np.random.default_rng(seed)
    return 0.70 + 0.05 * rng.integers(0, 7, n).astype(np.float64)


def word_corpus(n_bytes: int, seed: int = 0) -> WeightedText:
    """Word-salad text with grid utilities, as one WeightedText."""
    text = zipf_word_text(n_bytes, seed)
    return WeightedText(text, grid_weights(len(text), seed + 1))


def cached_corpus_path(n_bytes: int, seed: int, cache_dir: str) -> str:
    """Generate (once) and return the path of a corpus file of n_bytes."""
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"words_{n_bytes}_{seed}.txt")
    if not (os.path.exists(path) and os.path.getsize(path) == n_bytes):
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(zipf_word_text(n_bytes, seed))
        os.replace(tmp, path)
    return path

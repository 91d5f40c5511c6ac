import os

import numpy as np
import pytest

from usi.suffix import (
    SuffixArrayIndex,
    bottom_up_lcp_intervals,
    build_lcp,
    build_suffix_array,
    lcp_interval_arrays,
    leaf_parent_depths,
    load_suffix_cache,
    occurrence_positions,
    pattern_interval,
    save_suffix_cache,
)

import oracles
from conftest import random_text


def sorted_suffixes(text: bytes) -> list[int]:
    return sorted(range(len(text)), key=lambda i: text[i:])


def pairwise_lcp(text: bytes, order: list[int]) -> list[int]:
    out = [0]
    for prev, cur in zip(order, order[1:]):
        a, b = text[prev:], text[cur:]
        length = 0
        while length < min(len(a), len(b)) and a[length] == b[length]:
            length += 1
        out.append(length)
    return out


class TestSuffixArray:
    def test_banana(self):
        idx = build_suffix_array(b"banana")
        assert idx.sa.tolist() == [5, 3, 1, 0, 4, 2]
        assert idx.lcp.tolist() == [0, 1, 3, 0, 0, 2]

    def test_single_letter(self):
        idx = build_suffix_array(b"a")
        assert idx.sa.tolist() == [0] and idx.lcp.tolist() == [0]

    def test_abab(self):
        assert build_suffix_array(b"abab").sa.tolist() == [2, 0, 3, 1]

    def test_run_of_equal_letters(self):
        idx = build_suffix_array(b"aaaa")
        assert idx.sa.tolist() == [3, 2, 1, 0]
        assert idx.lcp.tolist() == [0, 1, 2, 3]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_suffix_array(b"")

    def test_random_texts_match_explicit_sort(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            n = int(rng.integers(1, 120))
            text = random_text(rng, n, int(rng.choice([1, 2, 4, 26])))
            idx = build_suffix_array(text)
            want = sorted_suffixes(text)
            assert idx.sa.tolist() == want
            assert idx.lcp.tolist() == pairwise_lcp(text, want)
            # sa is a permutation
            assert sorted(idx.sa.tolist()) == list(range(n))

    def test_build_lcp_standalone(self):
        text = b"mississippi"
        sa = np.array(sorted_suffixes(text), np.int32)
        assert build_lcp(text, sa).tolist() == pairwise_lcp(text, sa.tolist())

    def test_full_byte_alphabet(self):
        rng = np.random.default_rng(11)
        text = bytes(rng.integers(0, 256, 400).astype(np.uint8))
        assert build_suffix_array(text).sa.tolist() == sorted_suffixes(text)


class TestPatternInterval:
    def test_banana_examples(self):
        text = b"banana"
        idx = build_suffix_array(text)
        assert pattern_interval(idx, text, b"an") == (1, 2)
        assert sorted(occurrence_positions(idx, text, b"an").tolist()) == [1, 3]
        assert pattern_interval(idx, text, b"banana") == (3, 3)
        assert pattern_interval(idx, text, b"x") is None

    def test_empty_pattern_rejected(self):
        idx = build_suffix_array(b"abc")
        with pytest.raises(ValueError):
            pattern_interval(idx, b"abc", b"")

    def test_pattern_longer_than_text(self):
        idx = build_suffix_array(b"ab")
        assert pattern_interval(idx, b"ab", b"abc") is None

    def test_random_occurrence_sets_match_scan(self):
        # spec-scale randomized check: occurrence sets equal a direct text scan
        rng = np.random.default_rng(12)
        trials = 0
        while trials < 10_000:
            n = int(rng.integers(1, 513))
            text = random_text(rng, n, int(rng.choice([1, 2, 4, 26])))
            idx = build_suffix_array(text)
            for _ in range(25):
                if rng.random() < 0.8:
                    i = int(rng.integers(0, n))
                    m = int(rng.integers(1, min(8, n - i) + 1))
                    pattern = text[i:i + m]
                else:
                    m = int(rng.integers(1, 6))
                    pattern = random_text(rng, m, 4)
                got = sorted(occurrence_positions(idx, text, pattern).tolist())
                assert got == oracles.occurrences(text, pattern)
                trials += 1


class TestLcpIntervals:
    def test_banana_intervals(self):
        idx = build_suffix_array(b"banana")
        got = {(v.lcp, v.lb, v.rb) for v in bottom_up_lcp_intervals(idx)}
        assert got == {(1, 0, 2), (3, 1, 2), (2, 4, 5)}

    def test_children_before_parents(self):
        idx = build_suffix_array(b"banana")
        seen = []
        for v in bottom_up_lcp_intervals(idx):
            for child in v.child_list:
                assert (child.lcp, child.lb, child.rb) in seen
                assert child.parent_lcp == v.lcp
                assert v.lb <= child.lb and child.rb <= v.rb and child.lcp > v.lcp
            seen.append((v.lcp, v.lb, v.rb))

    def test_run_chain(self):
        idx = build_suffix_array(b"aaaa")
        got = [(v.lcp, v.lb, v.rb) for v in bottom_up_lcp_intervals(idx)]
        assert got == [(3, 2, 3), (2, 1, 3), (1, 0, 3)]

    def test_distinct_letters_no_repeats(self):
        idx = build_suffix_array(bytes(range(97, 123)))
        assert list(bottom_up_lcp_intervals(idx)) == []

    def test_interval_semantics_random(self):
        # each interval: shared prefix of exactly lcp, maximal, frequency matches scan
        rng = np.random.default_rng(13)
        for _ in range(60):
            n = int(rng.integers(2, 90))
            text = random_text(rng, n, int(rng.choice([1, 2, 4])))
            idx = build_suffix_array(text)
            intervals = list(bottom_up_lcp_intervals(idx))
            for v in intervals:
                sub = text[idx.sa[v.lb]:idx.sa[v.lb] + v.lcp]
                assert len(sub) == v.lcp
                for r in range(v.lb, v.rb + 1):
                    assert text[idx.sa[r]:idx.sa[r] + v.lcp] == sub
                if v.lb > 0:
                    assert text[idx.sa[v.lb - 1]:idx.sa[v.lb - 1] + v.lcp] != sub
                if v.rb < n - 1:
                    assert text[idx.sa[v.rb + 1]:idx.sa[v.rb + 1] + v.lcp] != sub
                assert v.frequency == oracles.frequency(text, sub)
            # emitted exactly once
            keys = [(v.lcp, v.lb, v.rb) for v in intervals]
            assert len(keys) == len(set(keys))

    def test_array_and_object_traversals_agree(self):
        rng = np.random.default_rng(14)
        for _ in range(40):
            n = int(rng.integers(2, 200))
            text = random_text(rng, n, int(rng.choice([2, 4, 26])))
            idx = build_suffix_array(text)
            d, lb, rb, pd = lcp_interval_arrays(idx.lcp)
            from_arrays = list(zip(d.tolist(), lb.tolist(), rb.tolist(), pd.tolist()))
            from_objects = [
                (v.lcp, v.lb, v.rb, v.parent_lcp) for v in bottom_up_lcp_intervals(idx)
            ]
            assert from_arrays == from_objects

    def test_leaf_parent_depths(self):
        idx = build_suffix_array(b"banana")
        assert leaf_parent_depths(idx.lcp).tolist() == [1, 3, 3, 0, 2, 2]


class TestDiskCache:
    def test_round_trip(self, tmp_path):
        text = b"the quick brown fox jumps over the lazy dog"
        idx = build_suffix_array(text)
        path = save_suffix_cache(idx, text, str(tmp_path))
        assert os.path.exists(path)
        loaded = load_suffix_cache(text, str(tmp_path))
        assert loaded is not None
        np.testing.assert_array_equal(loaded.sa, idx.sa)
        np.testing.assert_array_equal(loaded.lcp, idx.lcp)

    def test_miss_for_other_text(self, tmp_path):
        text = b"abcabc"
        save_suffix_cache(build_suffix_array(text), text, str(tmp_path))
        assert load_suffix_cache(b"different", str(tmp_path)) is None

    def test_corrupt_header_rejected(self, tmp_path):
        text = b"abcabc"
        path = save_suffix_cache(build_suffix_array(text), text, str(tmp_path))
        blob = bytearray(open(path, "rb").read())
        blob[0] ^= 0xFF
        open(path, "wb").write(bytes(blob))
        assert load_suffix_cache(text, str(tmp_path)) is None

import os

import numpy as np
import pytest

from usi.datasets import demo_weighted_text, grid_weights, zipf_word_text
from usi.weighted import WeightedText

CACHE_DIR = os.environ.get(
    "USI_TEST_CACHE", os.path.join(os.path.dirname(__file__), "_cache")
)

# Acceptance-scale corpora; generated once and cached on disk across runs.
CORPUS_BYTES = 52_500_000          # >= 50 MB
BIG_INPUT_BYTES = 105_000_000      # >= 100 MB
CORPUS_SEED = 424242


@pytest.fixture(scope="session")
def corpus_path() -> str:
    from usi.datasets import cached_corpus_path

    return cached_corpus_path(CORPUS_BYTES, CORPUS_SEED, CACHE_DIR)


@pytest.fixture(scope="session")
def big_input_path() -> str:
    from usi.datasets import cached_corpus_path

    return cached_corpus_path(BIG_INPUT_BYTES, CORPUS_SEED + 1, CACHE_DIR)


@pytest.fixture(scope="session")
def corpus_text(corpus_path) -> bytes:
    with open(corpus_path, "rb") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def corpus_weighted(corpus_text) -> WeightedText:
    return WeightedText(corpus_text, grid_weights(len(corpus_text), CORPUS_SEED + 2))


@pytest.fixture(scope="session")
def corpus_suffix(corpus_text):
    from usi.suffix import build_suffix_array

    return build_suffix_array(corpus_text)


@pytest.fixture(scope="session")
def corpus_tables(corpus_suffix):
    from usi.topk_exact import build_tuning_tables

    return build_tuning_tables(corpus_suffix)


@pytest.fixture()
def demo_wt() -> WeightedText:
    return demo_weighted_text()


def random_text(rng: np.random.Generator, n: int, sigma: int) -> bytes:
    return bytes(rng.integers(97, 97 + sigma, n).astype(np.uint8))

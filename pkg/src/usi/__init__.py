"""Utility string indexing.

Index a weighted text (byte string + one utility per position) so that the
global utility of any query pattern is answered fast: precomputed for the
top-K frequent substrings, computed on the fly against a frequency bound for
everything else. Ships exact and approximate top-K frequent-substring
miners, streaming-sketch competitors, and an evaluation harness.
"""

from .fingerprint import Fingerprinter
from .index import UsiIndex, UtilityTable, build_usi, deserialize, fallback_utility, serialize
from .suffix import (
    LcpInterval,
    SuffixArrayIndex,
    bottom_up_lcp_intervals,
    build_lcp,
    build_suffix_array,
    pattern_interval,
)
from .topk_approx import (
    LceOracle,
    SampledEntry,
    approximate_top_k,
    build_sparse_structures,
    merge_round_lists,
    round_top_k,
    sample_positions,
)
from .topk_exact import (
    FrequencyTriple,
    TopKTriple,
    TuningTables,
    build_tuning_tables,
    exact_top_k,
    tune_by_k,
    tune_by_tau,
)
from .weighted import (
    PrefixUtilityArray,
    UtilitySpec,
    WeightedText,
    build_prefix_utility,
    global_utility_bruteforce,
    load_weighted_text,
    local_utility,
)

__version__ = "0.1.0"

__all__ = [
    "Fingerprinter",
    "FrequencyTriple",
    "LceOracle",
    "LcpInterval",
    "PrefixUtilityArray",
    "SampledEntry",
    "SuffixArrayIndex",
    "TopKTriple",
    "TuningTables",
    "UsiIndex",
    "UtilitySpec",
    "UtilityTable",
    "WeightedText",
    "approximate_top_k",
    "bottom_up_lcp_intervals",
    "build_lcp",
    "build_prefix_utility",
    "build_sparse_structures",
    "build_suffix_array",
    "build_tuning_tables",
    "build_usi",
    "deserialize",
    "exact_top_k",
    "fallback_utility",
    "global_utility_bruteforce",
    "load_weighted_text",
    "local_utility",
    "merge_round_lists",
    "pattern_interval",
    "round_top_k",
    "sample_positions",
    "serialize",
    "tune_by_k",
    "tune_by_tau",
]

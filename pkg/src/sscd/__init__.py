"""Semantic change scoring for words via context swapping between corpora.

Given two corpora and, per target word, the set of its contextualised
embeddings in each (its "sibling" sets), this package scores how much the
word's meaning differs between the corpora: it measures a divergence or
distance between the two sibling distributions, repeatedly swaps random or
centroid-ranked occurrence subsets between the corpora, re-measures, and
reports the mean absolute difference between the original and post-swap
values. Stable words barely react to swapping; changed words do.

The library surface mirrors the pipeline: corpus IO (:mod:`sscd.corpus`),
Gaussian summaries (:mod:`sscd.gaussian`), metrics (:mod:`sscd.metrics`),
swapping (:mod:`sscd.swap`), scoring (:mod:`sscd.scoring`), evaluation
against gold ratings (:mod:`sscd.evaluation`), and synthetic benchmarks
(:mod:`sscd.synth`). The ``sscd`` command drives it end to end.
"""

__version__ = "0.1.0"

from .corpus import (
    CorpusManifest,
    GoldRanking,
    SiblingSet,
    TargetWord,
    check_manifest_consistency,
    load_gold,
    load_manifest,
    load_sibling_set,
    sibling_path,
    write_manifest,
    write_sibling_set,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    EvaluationError,
    GoldFormatError,
    ManifestError,
    SiblingFormatError,
    SSCDError,
    UnscorableWordError,
)
from .evaluation import EvalReport, evaluate_run, spearman_rho
from .gaussian import VAR_FLOOR, GaussianSummary, fit_gaussian
from .metrics import (
    MetricSpec,
    dscd_distance,
    jeffreys_divergence,
    kl_divergence,
    score_pair,
    vector_distance,
)
from .scoring import (
    ChangeScore,
    RateSearchResult,
    ScoreBatch,
    bootstrap_ci,
    estimate_swap_rate,
    score_all,
    score_word,
)
from .swap import SwapConfig, SwapOutcome, perform_swap, swap_count, swap_count_normalized
from .synth import SynthBenchmark, SynthSpec, WordProfile, generate, write_benchmark

__all__ = [
    "__version__",
    "ChangeScore",
    "ConfigError",
    "CorpusManifest",
    "DegenerateInputError",
    "EvalReport",
    "EvaluationError",
    "GaussianSummary",
    "GoldFormatError",
    "GoldRanking",
    "ManifestError",
    "MetricSpec",
    "RateSearchResult",
    "SSCDError",
    "ScoreBatch",
    "SiblingFormatError",
    "SiblingSet",
    "SwapConfig",
    "SwapOutcome",
    "SynthBenchmark",
    "SynthSpec",
    "TargetWord",
    "UnscorableWordError",
    "VAR_FLOOR",
    "WordProfile",
    "bootstrap_ci",
    "check_manifest_consistency",
    "dscd_distance",
    "estimate_swap_rate",
    "evaluate_run",
    "fit_gaussian",
    "generate",
    "jeffreys_divergence",
    "kl_divergence",
    "load_gold",
    "load_manifest",
    "load_sibling_set",
    "perform_swap",
    "score_all",
    "score_pair",
    "score_word",
    "sibling_path",
    "spearman_rho",
    "swap_count",
    "swap_count_normalized",
    "vector_distance",
    "write_benchmark",
    "write_manifest",
    "write_sibling_set",
]

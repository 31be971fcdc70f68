"""Rank-correlation evaluation of change scores against gold ratings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .corpus import GoldRanking
from .errors import EvaluationError
from .metrics import DISTANCE_NAMES, DIVERGENCE_NAMES
from .scoring import ChangeScore, RateSearchResult

EVAL_MODES = ("pooled", "per_seed_mean")


@dataclass(frozen=True)
class EvalReport:
    """Spearman agreement with gold, plus the words left out of it."""

    spearman: float
    n_words: int
    per_seed_spearman: tuple[float, ...] | None
    mean_seed_spearman: float | None
    excluded: tuple[str, ...]


def _rank_corr(x: Sequence[float], y: Sequence[float]) -> float:
    # Pearson correlation of average ("fractional") ranks; ties share the
    # mean of the positions they occupy.
    rx = rankdata(np.asarray(x, dtype=np.float64), method="average")
    ry = rankdata(np.asarray(y, dtype=np.float64), method="average")
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = math.fsum(dx * dx)
    vy = math.fsum(dy * dy)
    if vx == 0.0 or vy == 0.0:
        raise EvaluationError("zero rank variance: one side is constant")
    return math.fsum(dx * dy) / math.sqrt(vx * vy)


def spearman_rho(scores: Sequence[tuple[str, float]], gold: GoldRanking) -> float:
    """Spearman rho between predicted scores and gold, on common lemmas.

    Needs at least two lemmas shared by both sides and non-constant values
    on each side; anything less raises :class:`EvaluationError`.
    """
    predicted = dict(scores)
    common = [lemma for lemma, _ in gold.entries if lemma in predicted]
    if len(common) < 2:
        raise EvaluationError(
            f"need >= 2 lemmas common to scores and gold, found {len(common)}"
        )
    return _rank_corr(
        [predicted[w] for w in common], [gold.score(w) for w in common]
    )


def evaluate_run(
    scores: Sequence[ChangeScore],
    gold: GoldRanking,
    mode: str = "pooled",
) -> EvalReport:
    """Evaluate a batch of change scores against gold.

    ``pooled`` ranks the point scores once. ``per_seed_mean`` ranks the
    per-repetition scores separately for every repetition index (each index
    corresponds to one swap seed) and averages the resulting rho values,
    which is how multi-seed runs are usually reported.
    """
    if mode not in EVAL_MODES:
        raise EvaluationError(f"unknown eval mode {mode!r}; expected {EVAL_MODES}")
    by_lemma = {s.lemma_key: s for s in scores}
    common = [lemma for lemma, _ in gold.entries if lemma in by_lemma]
    excluded = tuple(lemma for lemma, _ in gold.entries if lemma not in by_lemma)
    if len(common) < 2:
        raise EvaluationError(
            f"need >= 2 lemmas common to scores and gold, found {len(common)}"
        )
    gold_values = [gold.score(w) for w in common]
    if mode == "pooled":
        rho = _rank_corr([by_lemma[w].point_score for w in common], gold_values)
        return EvalReport(
            spearman=rho,
            n_words=len(common),
            per_seed_spearman=None,
            mean_seed_spearman=None,
            excluded=excluded,
        )
    rep_counts = {len(by_lemma[w].per_rep) for w in common}
    if rep_counts == {0}:
        raise EvaluationError("per_seed_mean needs per-repetition scores")
    if len(rep_counts) != 1:
        raise EvaluationError(
            f"words carry differing repetition counts: {sorted(rep_counts)}"
        )
    n_reps = rep_counts.pop()
    per_seed = tuple(
        _rank_corr([by_lemma[w].per_rep[k].score for w in common], gold_values)
        for k in range(n_reps)
    )
    mean_rho = math.fsum(per_seed) / n_reps
    return EvalReport(
        spearman=mean_rho,
        n_words=len(common),
        per_seed_spearman=per_seed,
        mean_seed_spearman=mean_rho,
        excluded=excluded,
    )


# ---------------------------------------------------------------------------
# report files

_METRIC_ORDER = {name: i for i, name in enumerate(DIVERGENCE_NAMES + DISTANCE_NAMES)}
_FAMILY_ORDER = {"divergence": 0, "mean_distance": 1, "dscd": 2}


def write_summary_table(
    path: str | Path,
    cells: Mapping[tuple[str, str, float], float],
) -> None:
    """CSV matrix of Spearman values: one row per (family, metric), one
    column per rate, plus the best rate and value of each row.

    ``cells`` maps (family, metric_name, rate) to a rho value. Ties for the
    best value resolve to the smallest rate. An empty mapping produces a
    header-only file.
    """
    rates = sorted({rate for _, _, rate in cells})
    rows = sorted(
        {(family, name) for family, name, _ in cells},
        key=lambda fn: (_FAMILY_ORDER.get(fn[0], 99), _METRIC_ORDER.get(fn[1], 99)),
    )
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["family", "metric", *[format(r, "g") for r in rates], "best_rate", "best_value"]
        )
        for family, name in rows:
            values = [cells.get((family, name, r)) for r in rates]
            present = [(v, r) for v, r in zip(values, rates) if v is not None]
            best_value = max(v for v, _ in present)
            best_rate = min(r for v, r in present if v == best_value)
            writer.writerow(
                [
                    family,
                    name,
                    *["" if v is None else repr(v) for v in values],
                    format(best_rate, "g"),
                    repr(best_value),
                ]
            )


def write_rate_curve(path: str | Path, result: RateSearchResult) -> None:
    """Plot-ready CSV of rate vs mean (and std) post-swap metric value."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["rate", "mean_e_swap", "std_e_swap"])
        for rate, mean, std in zip(result.grid, result.mean_e_swap, result.std_e_swap):
            writer.writerow([format(rate, "g"), repr(mean), repr(std)])

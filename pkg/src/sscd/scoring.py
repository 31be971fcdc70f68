"""Per-word change scoring through repeated context swapping.

For a word with sibling sets ``s1`` and ``s2`` the score is built from the
metric value before swapping (``e_original``) and after each of several
independent swap repetitions (``e_swap``): each repetition contributes
``|e_original - e_swap|`` and the point score is their mean. A swap rate of
exactly 0 is the ablation mode where the point score degenerates to the raw
metric value ``e_original`` itself.

All randomness is drawn from streams keyed by (base seed, lemma, purpose,
repetition), so batches are reproducible bit-for-bit regardless of
execution order or worker count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import rng as _rng
from .corpus import SiblingSet
from .errors import ConfigError, UnscorableWordError
from .metrics import MetricSpec, score_pair
from .swap import SwapConfig, perform_swap

SCORE_CSV_HEADER = ("lemma", "score", "e_original", "ci_low", "ci_high")
PER_REP_CSV_HEADER = ("lemma", "rep", "e_swap", "score")


@dataclass(frozen=True)
class RepetitionScore:
    e_swap: float
    score: float


@dataclass(frozen=True)
class ChangeScore:
    """One word's change score with its per-repetition breakdown."""

    lemma_key: str
    e_original: float
    per_rep: tuple[RepetitionScore, ...]
    point_score: float
    ci_low: float | None = None
    ci_high: float | None = None

    def rep_scores(self) -> tuple[float, ...]:
        return tuple(r.score for r in self.per_rep)


@dataclass(frozen=True)
class ScoreBatch:
    """Scores in input order plus the words that could not be scored."""

    scores: tuple[ChangeScore, ...]
    unscorable: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RateSearchResult:
    """Mean post-swap metric value per candidate rate, and its argmin."""

    grid: tuple[float, ...]
    mean_e_swap: tuple[float, ...]
    std_e_swap: tuple[float, ...]
    estimated_rate: float
    excluded: tuple[str, ...]


def score_word(
    s1: SiblingSet,
    s2: SiblingSet,
    metric: MetricSpec,
    swap_cfg: SwapConfig,
    repetitions: int,
    base_seed: int,
) -> ChangeScore:
    """Score one word: ``e_original`` once, then one swap per repetition."""
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    if s1.is_empty or s2.is_empty:
        empty = s1 if s1.is_empty else s2
        raise UnscorableWordError(empty.lemma_key, "empty sibling set")
    lemma = s1.lemma_key
    e_original = score_pair(metric, s1, s2, _rng.stream(base_seed, lemma, _rng.ORIGINAL))
    reps = []
    for k in range(repetitions):
        outcome = perform_swap(s1, s2, swap_cfg, _rng.stream(base_seed, lemma, _rng.SWAP, k))
        e_swap = score_pair(
            metric,
            outcome.s1_swapped,
            outcome.s2_swapped,
            _rng.stream(base_seed, lemma, _rng.EVAL, k),
        )
        reps.append(RepetitionScore(e_swap=e_swap, score=abs(e_original - e_swap)))
    if swap_cfg.rate == 0.0:
        # ablation mode: no swapping happened, report the raw metric value
        point = e_original
    else:
        point = math.fsum(r.score for r in reps) / repetitions
    return ChangeScore(
        lemma_key=lemma, e_original=e_original, per_rep=tuple(reps), point_score=point
    )


def score_all(
    pairs: Sequence[tuple[SiblingSet, SiblingSet]],
    metric: MetricSpec,
    swap_cfg: SwapConfig,
    repetitions: int,
    base_seed: int,
    n_jobs: int = 1,
) -> ScoreBatch:
    """Score every word pair; unscorable words are collected, not fatal.

    Output order equals input order and is bit-identical for any ``n_jobs``
    because every repetition draws from its own keyed stream.
    """

    def one(pair):
        s1, s2 = pair
        try:
            return score_word(s1, s2, metric, swap_cfg, repetitions, base_seed)
        except UnscorableWordError as exc:
            return exc

    if n_jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    scores = []
    skipped = []
    for res in results:
        if isinstance(res, UnscorableWordError):
            skipped.append((res.lemma_key, res.reason))
        else:
            scores.append(res)
    return ScoreBatch(scores=tuple(scores), unscorable=tuple(skipped))


def bootstrap_ci(
    score: ChangeScore,
    level: float,
    resamples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean per-repetition score.

    Resamples the per-repetition scores with replacement, takes the mean of
    each resample, and returns the (1-level)/2 and 1-(1-level)/2 empirical
    quantiles.
    """
    values = np.asarray(score.rep_scores(), dtype=np.float64)
    if values.size < 2:
        raise ConfigError("bootstrap needs at least 2 repetitions")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"confidence level must be in (0, 1), got {level}")
    if resamples < 1:
        raise ConfigError("resamples must be >= 1")
    draws = rng.integers(0, values.size, size=(resamples, values.size))
    means = values[draws].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    low, high = np.quantile(means, [alpha, 1.0 - alpha])
    return float(low), float(high)


def attach_bootstrap_ci(
    score: ChangeScore, level: float, resamples: int, base_seed: int
) -> ChangeScore:
    """Return the score with its CI filled from the word's bootstrap stream."""
    low, high = bootstrap_ci(
        score, level, resamples, _rng.stream(base_seed, score.lemma_key, _rng.BOOTSTRAP)
    )
    return replace(score, ci_low=low, ci_high=high)


def estimate_swap_rate(
    pairs: Sequence[tuple[SiblingSet, SiblingSet]],
    metric: MetricSpec,
    swap_cfg: SwapConfig,
    grid: Sequence[float],
    repetitions: int,
    base_seed: int,
) -> RateSearchResult:
    """Unsupervised swap-rate selection: argmin of the mean ``e_swap``.

    For each candidate rate, averages the post-swap metric value over all
    scorable words and repetitions; the estimated rate is the grid argmin,
    with ties resolved toward the smallest rate. Swap streams are keyed by
    (word, repetition) only, so all rates see the same draws (common random
    numbers), which makes the comparison across rates less noisy.
    """
    grid = tuple(float(r) for r in grid)
    if not grid:
        raise ConfigError("rate grid must be non-empty")
    if any(not 0.0 < r <= 1.0 for r in grid):
        raise ConfigError("grid rates must be in (0, 1]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid rates must be strictly increasing")
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")

    usable = []
    excluded = []
    for s1, s2 in pairs:
        if s1.is_empty or s2.is_empty:
            excluded.append(s1.lemma_key if s1.lemma_key else s2.lemma_key)
        else:
            usable.append((s1, s2))
    if not usable:
        raise ConfigError("no scorable words for rate search")

    means = []
    stds = []
    for rate in grid:
        cfg = replace(swap_cfg, rate=rate)
        values = []
        for s1, s2 in usable:
            lemma = s1.lemma_key
            for k in range(repetitions):
                outcome = perform_swap(
                    s1, s2, cfg, _rng.stream(base_seed, lemma, _rng.SWAP, k)
                )
                values.append(
                    score_pair(
                        metric,
                        outcome.s1_swapped,
                        outcome.s2_swapped,
                        _rng.stream(base_seed, lemma, _rng.EVAL, k),
                    )
                )
        means.append(math.fsum(values) / len(values))
        stds.append(float(np.std(values, ddof=1)) if len(values) > 1 else 0.0)

    best = int(np.argmin(means))  # argmin takes the first, i.e. smallest, rate on ties
    return RateSearchResult(
        grid=grid,
        mean_e_swap=tuple(means),
        std_e_swap=tuple(stds),
        estimated_rate=grid[best],
        excluded=tuple(dict.fromkeys(excluded)),
    )


# ---------------------------------------------------------------------------
# score artifacts


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_scores_csv(path: str | Path, scores: Sequence[ChangeScore]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SCORE_CSV_HEADER)
        for s in scores:
            writer.writerow(
                [s.lemma_key, _fmt(s.point_score), _fmt(s.e_original), _fmt(s.ci_low), _fmt(s.ci_high)]
            )


def write_per_rep_csv(path: str | Path, scores: Sequence[ChangeScore]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(PER_REP_CSV_HEADER)
        for s in scores:
            for k, rep in enumerate(s.per_rep):
                writer.writerow([s.lemma_key, k, _fmt(rep.e_swap), _fmt(rep.score)])


def read_scores_csv(path: str | Path) -> list[ChangeScore]:
    """Load a scores CSV back into (point-score-only) ChangeScore records."""
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if tuple(header or ()) != SCORE_CSV_HEADER:
            raise ConfigError(f"{path}: unexpected scores CSV header {header}")
        for row in reader:
            lemma, score, e_original, ci_low, ci_high = row
            out.append(
                ChangeScore(
                    lemma_key=lemma,
                    e_original=float(e_original),
                    per_rep=(),
                    point_score=float(score),
                    ci_low=float(ci_low) if ci_low else None,
                    ci_high=float(ci_high) if ci_high else None,
                )
            )
    return out


def read_per_rep_csv(path: str | Path) -> dict[str, list[RepetitionScore]]:
    out: dict[str, list[RepetitionScore]] = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if tuple(header or ()) != PER_REP_CSV_HEADER:
            raise ConfigError(f"{path}: unexpected per-rep CSV header {header}")
        for lemma, rep, e_swap, score in reader:
            out.setdefault(lemma, []).append(
                RepetitionScore(e_swap=float(e_swap), score=float(score))
            )
    return out


def merge_per_rep(
    scores: Sequence[ChangeScore], per_rep: dict[str, list[RepetitionScore]]
) -> list[ChangeScore]:
    """Reattach per-repetition rows (from a per-rep CSV) to point scores."""
    merged = []
    for s in scores:
        reps = per_rep.get(s.lemma_key)
        merged.append(replace(s, per_rep=tuple(reps)) if reps else s)
    return merged

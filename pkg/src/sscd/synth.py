"""Synthetic two-corpus benchmarks with planted change profiles.

Each word is backed by a known generator: a base diagonal Gaussian for the
first corpus and a profile-dependent transformation of it for the second
(stable copy, per-dimension mean shift, variance scaling, or a mixture that
adds a displaced sense component). Planted gold scores are monotone in the
effect size, so ranking quality can be measured without any human data.
The generators themselves are exposed so closed-form values (for example
the KL divergence between the true parameter pairs) can serve as oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as _rng
from .corpus import (
    CorpusManifest,
    GoldRanking,
    SiblingSet,
    sibling_path,
    write_manifest,
    write_sibling_set,
)
from .errors import ConfigError
from .gaussian import GaussianSummary

PROFILE_KINDS = ("stable", "mean_shift", "var_shift", "sense_gain")

_BASE_TAG = 10
_COUNT_TAG = 11
_SAMPLE_TAG = 12


@dataclass(frozen=True)
class WordProfile:
    """How one word's distribution differs between the two pseudo-corpora.

    ``amount`` is the per-dimension mean shift, the variance scale factor,
    or the new-sense mixture weight depending on ``kind``. ``offset`` is the
    per-dimension displacement of the added sense component (sense_gain
    only). Explicit ``n1``/``n2`` override the log-uniform occurrence draw.
    """

    kind: str
    amount: float = 0.0
    offset: float = 4.0
    n1: int | None = None
    n2: int | None = None
    gold: float | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ConfigError(f"unknown profile kind {self.kind!r}; expected {PROFILE_KINDS}")
        if self.amount < 0:
            raise ConfigError("profile amount must be >= 0")
        if self.kind == "var_shift" and self.amount == 0:
            raise ConfigError("var_shift needs a positive variance scale")
        if self.kind == "sense_gain" and not 0.0 <= self.amount <= 1.0:
            raise ConfigError("sense_gain weight must be in [0, 1]")

    def default_gold(self) -> float:
        if self.kind == "stable":
            return 0.0
        if self.kind == "mean_shift":
            return self.amount
        if self.kind == "var_shift":
            return abs(float(np.log2(self.amount)))
        return self.amount  # sense_gain: mixture weight

    def gold_score(self) -> float:
        return self.default_gold() if self.gold is None else self.gold

    def signature(self) -> tuple:
        return (self.kind, self.amount, self.offset)


@dataclass(frozen=True)
class SynthSpec:
    profiles: tuple[WordProfile, ...]
    dim: int = 16
    n_range: tuple[int, int] = (50, 500)
    seed: int = 0
    base_mean_scale: float = 2.0
    base_var_range: tuple[float, float] = (0.5, 2.0)
    total_sentences: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.profiles:
            raise ConfigError("need at least one word profile")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise ConfigError(f"bad occurrence range {self.n_range}")
        object.__setattr__(self, "profiles", tuple(self.profiles))
        # gold ties are only allowed between words with identical profiles
        by_gold: dict[float, tuple] = {}
        for p in self.profiles:
            sig = by_gold.setdefault(p.gold_score(), p.signature())
            if sig != p.signature():
                raise ConfigError(
                    f"gold score {p.gold_score()} is shared by different profiles; "
                    "set explicit gold values to disambiguate"
                )

    @property
    def n_words(self) -> int:
        return len(self.profiles)


@dataclass(frozen=True)
class WordGenerator:
    """Ground-truth sampling parameters of one word in both corpora."""

    lemma_key: str
    profile: WordProfile
    corpus1: GaussianSummary
    corpus2: GaussianSummary
    sense_weight: float = 0.0
    sense_mean: np.ndarray | None = None


@dataclass(frozen=True)
class SynthBenchmark:
    manifest1: CorpusManifest
    manifest2: CorpusManifest
    siblings1: dict[str, SiblingSet]
    siblings2: dict[str, SiblingSet]
    gold: GoldRanking
    generators: tuple[WordGenerator, ...] = field(repr=False, default=())

    def pairs(self) -> list[tuple[SiblingSet, SiblingSet]]:
        return [(self.siblings1[g.lemma_key], self.siblings2[g.lemma_key]) for g in self.generators]


def _lemma(index: int, profile: WordProfile) -> str:
    return f"w{index:03d}_{profile.kind}"


def _draw_count(stream: np.random.Generator, lo: int, hi: int) -> int:
    if lo == hi:
        return lo
    # log-uniform keeps small-N words in the mix, which is where variance
    # flooring actually matters
    return int(round(np.exp(stream.uniform(np.log(lo), np.log(hi)))))


def _sample(stream, mean, var, n):
    return (mean + np.sqrt(var) * stream.standard_normal((n, mean.shape[0]))).astype(
        np.float32
    )


def generate(spec: SynthSpec) -> SynthBenchmark:
    """Build the benchmark: manifests, sibling sets, gold, and generators.

    Fully deterministic in ``spec.seed``; every word draws from streams
    keyed by its lemma, so regeneration is bit-identical and independent of
    word order.
    """
    generators = []
    siblings1: dict[str, SiblingSet] = {}
    siblings2: dict[str, SiblingSet] = {}
    gold_entries = []
    counts1 = []
    counts2 = []
    for i, profile in enumerate(spec.profiles):
        lemma = _lemma(i, profile)
        base = _rng.stream(spec.seed, lemma, _BASE_TAG)
        mean1 = base.normal(0.0, spec.base_mean_scale, spec.dim)
        lo, hi = spec.base_var_range
        var1 = np.exp(base.uniform(np.log(lo), np.log(hi), spec.dim))
        mean2, var2 = mean1.copy(), var1.copy()
        sense_weight, sense_mean = 0.0, None
        if profile.kind == "mean_shift":
            mean2 = mean1 + profile.amount
        elif profile.kind == "var_shift":
            var2 = var1 * profile.amount
        elif profile.kind == "sense_gain":
            sense_weight = profile.amount
            sense_mean = mean1 + profile.offset

        count_stream = _rng.stream(spec.seed, lemma, _COUNT_TAG)
        n1 = profile.n1 if profile.n1 is not None else _draw_count(count_stream, *spec.n_range)
        n2 = profile.n2 if profile.n2 is not None else _draw_count(count_stream, *spec.n_range)

        sample_stream = _rng.stream(spec.seed, lemma, _SAMPLE_TAG)
        vecs1 = _sample(sample_stream, mean1, var1, n1)
        if profile.kind == "sense_gain":
            from_new = sample_stream.random(n2) < sense_weight
            vecs2 = _sample(sample_stream, mean2, var2, n2)
            new_rows = _sample(sample_stream, sense_mean, var2, n2)
            vecs2[from_new] = new_rows[from_new]
        else:
            vecs2 = _sample(sample_stream, mean2, var2, n2)

        siblings1[lemma] = SiblingSet(
            lemma_key=lemma,
            corpus_id="synth-c1",
            vectors=vecs1,
            sentence_ids=tuple(f"{lemma}-c1-{j:06d}" for j in range(n1)),
        )
        siblings2[lemma] = SiblingSet(
            lemma_key=lemma,
            corpus_id="synth-c2",
            vectors=vecs2,
            sentence_ids=tuple(f"{lemma}-c2-{j:06d}" for j in range(n2)),
        )
        generators.append(
            WordGenerator(
                lemma_key=lemma,
                profile=profile,
                corpus1=GaussianSummary(mean=mean1, var=var1),
                corpus2=GaussianSummary(mean=mean2, var=var2),
                sense_weight=sense_weight,
                sense_mean=sense_mean,
            )
        )
        gold_entries.append((lemma, profile.gold_score()))
        counts1.append((lemma, n1))
        counts2.append((lemma, n2))

    totals = spec.total_sentences or (
        sum(c for _, c in counts1),
        sum(c for _, c in counts2),
    )
    manifest1 = CorpusManifest(
        corpus_id="synth-c1",
        epoch_label="t1",
        total_sentences=totals[0],
        embedding_dim=spec.dim,
        words=tuple(counts1),
    )
    manifest2 = CorpusManifest(
        corpus_id="synth-c2",
        epoch_label="t2",
        total_sentences=totals[1],
        embedding_dim=spec.dim,
        words=tuple(counts2),
    )
    return SynthBenchmark(
        manifest1=manifest1,
        manifest2=manifest2,
        siblings1=siblings1,
        siblings2=siblings2,
        gold=GoldRanking(entries=tuple(gold_entries)),
        generators=tuple(generators),
    )


def write_benchmark(bench: SynthBenchmark, out_dir: str | Path) -> dict[str, Path]:
    """Write the benchmark in the standard on-disk layout.

    Produces ``c1/`` and ``c2/`` corpus directories (manifest plus one
    sibling file per word), ``gold.tsv``, and ``targets.txt``; the exact
    same bytes the scoring pipeline reads for real corpora.
    """
    out_dir = Path(out_dir)
    paths = {
        "corpus1": out_dir / "c1",
        "corpus2": out_dir / "c2",
        "gold": out_dir / "gold.tsv",
        "targets": out_dir / "targets.txt",
    }
    for key, manifest, siblings in (
        ("corpus1", bench.manifest1, bench.siblings1),
        ("corpus2", bench.manifest2, bench.siblings2),
    ):
        paths[key].mkdir(parents=True, exist_ok=True)
        write_manifest(paths[key] / "manifest.json", manifest)
        for lemma, sset in siblings.items():
            write_sibling_set(sibling_path(paths[key], lemma), sset)
    with open(paths["gold"], "w", encoding="utf-8") as f:
        for lemma, score in bench.gold.entries:
            f.write(f"{lemma}\t{score!r}\n")
    with open(paths["targets"], "w", encoding="utf-8") as f:
        for lemma, _ in bench.gold.entries:
            f.write(lemma + "\n")
    return paths


# ---------------------------------------------------------------------------
# benchmark presets used by the CLI and the acceptance suite


def stable_benchmark(
    n_words: int = 20,
    dim: int = 16,
    n_range: tuple[int, int] = (50, 500),
    seed: int = 0,
) -> SynthSpec:
    """All-stable null benchmark: every word keeps its distribution."""
    return SynthSpec(
        profiles=tuple(WordProfile("stable", gold=-float(i)) for i in range(n_words)),
        dim=dim,
        n_range=n_range,
        seed=seed,
    )


def shifted_benchmark(
    n_words: int = 20,
    delta: float = 2.0,
    dim: int = 16,
    n_range: tuple[int, int] = (50, 500),
    seed: int = 0,
) -> SynthSpec:
    """Uniformly changed benchmark: every word's mean moves by ``delta``."""
    return SynthSpec(
        profiles=tuple(
            WordProfile("mean_shift", amount=delta, gold=delta + i)
            for i in range(n_words)
        ),
        dim=dim,
        n_range=n_range,
        seed=seed,
    )


def graded_benchmark(
    n_stable: int = 20,
    deltas: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0),
    per_delta: int = 5,
    dim: int = 16,
    n_range: tuple[int, int] = (50, 500),
    seed: int = 0,
) -> SynthSpec:
    """Mixed benchmark with graded mean shifts over a stable background."""
    profiles = [WordProfile("stable") for _ in range(n_stable)]
    for delta in deltas:
        profiles.extend(WordProfile("mean_shift", amount=delta) for _ in range(per_delta))
    return SynthSpec(profiles=tuple(profiles), dim=dim, n_range=n_range, seed=seed)


def rate_minimum_benchmark(
    n_words: int = 8,
    delta: float = 4.0,
    n_small: int = 200,
    size_ratio: float = 1.5,
    dim: int = 8,
    seed: int = 0,
) -> SynthSpec:
    """Benchmark whose mean post-swap distance dips at an interior rate.

    With occurrence counts n and ratio*n, the swapped means cross where
    rate * (1 + 1/ratio) = 1; ratio 1.5 plants the minimum at rate 0.6 for
    mean-distance metrics.
    """
    n_big = int(round(n_small * size_ratio))
    return SynthSpec(
        profiles=tuple(
            WordProfile("mean_shift", amount=delta, n1=n_small, n2=n_big, gold=delta + i)
            for i in range(n_words)
        ),
        dim=dim,
        seed=seed,
    )

"""Context swapping: exchange equal-size occurrence subsets between corpora.

Swapping operates directly on sibling embedding rows. Because the encoder
embeds sentences independently, exchanging rows is exactly equivalent to
exchanging the underlying sentences and re-encoding, so the raw text never
has to be touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import SiblingSet
from .errors import ConfigError, UnscorableWordError
from .gaussian import fit_moments
from .metrics import DISTANCE_NAMES, pairwise_distance

STRATEGIES = (
    "random",
    "centroid_distance",
    "random_normalized",
    "centroid_normalized",
)

# floor() guard: 0.3 * 10 evaluates to 2.999... in binary floating point,
# which would floor to 2 instead of the exact 3.
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class SwapConfig:
    """How much to swap and how to pick the swapped subsets.

    ``total_sentences`` carries the two corpus sizes (from the manifests)
    and is only consulted by the ``*_normalized`` strategies, which rescale
    the occurrence counts by corpus size before sizing the exchange.
    """

    rate: float
    strategy: str = "random"
    selection_metric: str = "cosine"
    total_sentences: tuple[int, int] | None = None

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ConfigError(f"swap rate must be in [0, 1], got {self.rate}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if self.selection_metric not in DISTANCE_NAMES:
            raise ConfigError(
                f"selection_metric must be one of {DISTANCE_NAMES}, "
                f"got {self.selection_metric!r}"
            )
        if self.total_sentences is not None:
            t1, t2 = self.total_sentences
            if t1 < 1 or t2 < 1:
                raise ConfigError("total_sentences entries must be >= 1")
            object.__setattr__(self, "total_sentences", (int(t1), int(t2)))

    @property
    def is_normalized(self) -> bool:
        return self.strategy.endswith("_normalized")

    @property
    def is_random(self) -> bool:
        return self.strategy.startswith("random")


@dataclass(frozen=True)
class SwapOutcome:
    """The two post-swap sibling sets of one repetition."""

    s1_swapped: SiblingSet
    s2_swapped: SiblingSet
    n_swapped: int
    swapped_ids: tuple[tuple[str, ...], tuple[str, ...]]


def swap_count(rate: float, n1: int, n2: int) -> int:
    """Size of the exchanged subsets: floor(rate * min(n1, n2))."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occurrence counts must be >= 0")
    return int(math.floor(rate * min(n1, n2) + _FLOOR_EPS))


def swap_count_normalized(
    rate: float, n1: int, n2: int, total1: int, total2: int
) -> int:
    """Corpus-size-normalized exchange size.

    Uses relative frequencies f_i = n_i / total_i and the smaller corpus
    size B = min(total1, total2): floor(rate * min(f1, f2) * B), capped at
    min(n1, n2) since the exchange removes that many rows from each side.
    """
    if total1 < 1 or total2 < 1:
        raise ValueError("corpus totals must be >= 1")
    if n1 < 0 or n2 < 0:
        raise ValueError("occurrence counts must be >= 0")
    f_min = min(n1 / total1, n2 / total2)
    base = min(total1, total2)
    count = int(math.floor(rate * f_min * base + _FLOOR_EPS))
    return min(count, n1, n2)


def _resolve_count(s1: SiblingSet, s2: SiblingSet, config: SwapConfig) -> int:
    if config.is_normalized:
        if config.total_sentences is None:
            raise ConfigError(
                f"strategy {config.strategy!r} needs total_sentences from the manifests"
            )
        t1, t2 = config.total_sentences
        return swap_count_normalized(config.rate, s1.n, s2.n, t1, t2)
    return swap_count(config.rate, s1.n, s2.n)


def _select_random(n: int, n_swap: int, rng: np.random.Generator) -> np.ndarray:
    idx = rng.choice(n, size=n_swap, replace=False)
    return np.sort(idx)


def _select_far_from_centroid(
    donors: SiblingSet, other_centroid: np.ndarray, metric: str, n_swap: int
) -> np.ndarray:
    dists = pairwise_distance(metric, donors.vectors, other_centroid[None, :])[:, 0]
    # descending distance; stable so equal distances keep original row order
    order = np.argsort(-dists, kind="stable")
    return np.sort(order[:n_swap])


def _exchange(
    donor: SiblingSet, incoming: SiblingSet, out_idx: np.ndarray, in_idx: np.ndarray
) -> SiblingSet:
    keep = np.setdiff1d(np.arange(donor.n), out_idx, assume_unique=True)
    vectors = np.concatenate([donor.vectors[keep], incoming.vectors[in_idx]], axis=0)
    ids = tuple(donor.sentence_ids[i] for i in keep) + tuple(
        incoming.sentence_ids[i] for i in in_idx
    )
    return SiblingSet(
        lemma_key=donor.lemma_key,
        corpus_id=donor.corpus_id,
        vectors=vectors,
        sentence_ids=ids,
    )


def perform_swap(
    s1: SiblingSet,
    s2: SiblingSet,
    config: SwapConfig,
    rng: np.random.Generator | None = None,
) -> SwapOutcome:
    """Exchange subsets of sibling rows between the two corpora.

    ``random*`` strategies sample each side's subset uniformly without
    replacement from ``rng``; ``centroid*`` strategies deterministically
    take the rows of one side farthest (by ``selection_metric``) from the
    mean vector of the other side. The union multiset of rows and the two
    set sizes are always preserved; a zero exchange returns the inputs
    unchanged.
    """
    if s1.is_empty or s2.is_empty:
        empty = s1 if s1.is_empty else s2
        raise UnscorableWordError(empty.lemma_key, "empty sibling set")
    if s1.lemma_key != s2.lemma_key:
        raise ValueError(
            f"cannot swap different words: {s1.lemma_key!r} vs {s2.lemma_key!r}"
        )
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    n_swap = _resolve_count(s1, s2, config)
    if n_swap == 0:
        return SwapOutcome(s1, s2, 0, ((), ()))
    if config.is_random:
        if rng is None:
            raise ConfigError("random strategies need an explicit rng stream")
        idx1 = _select_random(s1.n, n_swap, rng)
        idx2 = _select_random(s2.n, n_swap, rng)
    else:
        centroid1, _ = fit_moments(s1.vectors)
        centroid2, _ = fit_moments(s2.vectors)
        idx1 = _select_far_from_centroid(s1, centroid2, config.selection_metric, n_swap)
        idx2 = _select_far_from_centroid(s2, centroid1, config.selection_metric, n_swap)
    return SwapOutcome(
        s1_swapped=_exchange(s1, s2, idx1, idx2),
        s2_swapped=_exchange(s2, s1, idx2, idx1),
        n_swapped=n_swap,
        swapped_ids=(
            tuple(s1.sentence_ids[i] for i in idx1),
            tuple(s2.sentence_ids[i] for i in idx2),
        ),
    )

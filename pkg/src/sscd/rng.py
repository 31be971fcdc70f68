"""Keyed, reproducible random streams.

Every stochastic operation in this package takes an explicit numpy
``Generator``. Streams are derived from ``(base_seed, lemma_key, purpose,
index)``, so any (word, repetition) cell sees the same randomness no matter
in which order, or on how many workers, the batch is executed.
"""

from __future__ import annotations

import hashlib

import numpy as np

# Purpose tags keeping the per-word substreams disjoint.
ORIGINAL = 0   # scoring the unswapped pair (DSCD sampling)
SWAP = 1       # subset selection inside one swap repetition
EVAL = 2       # scoring the swapped pair (DSCD sampling)
BOOTSTRAP = 3  # bootstrap resampling of per-repetition scores


def _lemma_words(lemma_key: str) -> tuple[int, ...]:
    """Stable 128-bit hash of the lemma as four uint32 entropy words."""
    digest = hashlib.sha256(lemma_key.encode("utf-8")).digest()[:16]
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))


def stream(base_seed: int, lemma_key: str, *tags: int) -> np.random.Generator:
    """Return the generator keyed by (base_seed, lemma_key, *tags)."""
    if base_seed < 0:
        raise ValueError("base_seed must be non-negative")
    entropy = [int(base_seed), *_lemma_words(lemma_key)]
    entropy.extend(int(t) for t in tags)
    return np.random.default_rng(np.random.SeedSequence(entropy))

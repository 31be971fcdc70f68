"""Diagonal-covariance Gaussian summaries of sibling embedding sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import SiblingSet
from .errors import UnscorableWordError

# Floor keeps every variance strictly positive so the inverse and log-det
# used by the divergences stay finite for rare words with near-identical
# contexts.
VAR_FLOOR = 1e-6


@dataclass(frozen=True)
class GaussianSummary:
    """Mean vector and diagonal covariance of a sibling set, in float64."""

    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        var = np.ascontiguousarray(self.var, dtype=np.float64)
        if mean.ndim != 1 or var.shape != mean.shape:
            raise ValueError("mean and var must be 1-D vectors of equal length")
        if not (np.isfinite(mean).all() and np.isfinite(var).all()):
            raise ValueError("non-finite Gaussian parameters")
        if (var < VAR_FLOOR).any():
            raise ValueError(f"variances must be >= {VAR_FLOOR}")
        mean.flags.writeable = False
        var.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def _ordered_colsum(x: np.ndarray) -> np.ndarray:
    # Summing each column in sorted order makes the result independent of
    # row order, so fits are bit-identical under row permutation.
    return np.sort(x, axis=0).sum(axis=0)


def fit_moments(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and floored unbiased variances of an (N, d) matrix."""
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot fit moments of an empty matrix")
    mean = _ordered_colsum(x) / n
    if n == 1:
        var = np.full(x.shape[1], VAR_FLOOR)
    else:
        dev = x - mean
        var = _ordered_colsum(dev * dev) / (n - 1)
        var = np.maximum(var, VAR_FLOOR)
    return mean, var


def fit_gaussian(siblings: SiblingSet) -> GaussianSummary:
    """Fit a diagonal Gaussian to a sibling set.

    Variance is the unbiased (N-1) per-dimension estimate, floored at
    ``VAR_FLOOR``; an N=1 set gets the floor in every dimension. An empty
    set cannot be summarised and raises :class:`UnscorableWordError`.
    """
    if siblings.is_empty:
        raise UnscorableWordError(siblings.lemma_key, "empty sibling set")
    mean, var = fit_moments(siblings.vectors)
    return GaussianSummary(mean=mean, var=var)

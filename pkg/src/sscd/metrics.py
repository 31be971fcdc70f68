"""Divergence and distance functions between sibling distributions.

Three metric families drive the change scores:

- ``divergence``: closed-form Kullback-Leibler (both directions) and
  Jeffrey's divergence between the diagonal Gaussians fitted to each side.
- ``mean_distance``: one of seven vector distances (Bray-Curtis, Canberra,
  Chebyshev, city block, correlation, cosine, Euclidean) between the two
  fitted mean vectors.
- ``dscd``: the average pairwise distance over equal-size samples drawn
  from the two fitted Gaussians.

All arithmetic runs in float64 even though sibling files store float32;
log/determinant accumulation across hundreds of dimensions needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import SiblingSet
from .errors import ConfigError, DegenerateInputError, UnscorableWordError
from .gaussian import GaussianSummary, fit_gaussian

DIVERGENCE_NAMES = ("kl12", "kl21", "jeffreys")
DISTANCE_NAMES = (
    "braycurtis",
    "canberra",
    "chebyshev",
    "cityblock",
    "correlation",
    "cosine",
    "euclidean",
)
METRIC_NAMES = DIVERGENCE_NAMES + DISTANCE_NAMES

FAMILIES = ("divergence", "mean_distance", "dscd")
# short CLI spellings
FAMILY_ALIASES = {"div": "divergence", "mean": "mean_distance", "dscd": "dscd"}
_NAME_ALIASES = {"kl_12": "kl12", "kl_21": "kl21"}

DEFAULT_DSCD_SAMPLES = 100

# Rows per chunk when materialising pairwise blocks; keeps peak memory at
# roughly chunk * n_samples * d floats.
_PAIR_CHUNK = 256


@dataclass(frozen=True)
class MetricSpec:
    """Which metric to apply on the original and swapped sibling pairs."""

    family: str
    name: str
    dscd_samples: int = DEFAULT_DSCD_SAMPLES

    def __post_init__(self):
        family = FAMILY_ALIASES.get(self.family, self.family)
        name = _NAME_ALIASES.get(self.name, self.name)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "name", name)
        if family not in FAMILIES:
            raise ConfigError(f"unknown metric family {self.family!r}; expected {FAMILIES}")
        if family == "divergence":
            if name not in DIVERGENCE_NAMES:
                raise ConfigError(
                    f"family 'divergence' supports {DIVERGENCE_NAMES}, got {name!r}"
                )
        else:
            if name not in DISTANCE_NAMES:
                raise ConfigError(
                    f"family {family!r} supports {DISTANCE_NAMES}, got {name!r}"
                )
        if family == "dscd" and self.dscd_samples < 1:
            raise ConfigError("dscd_samples must be >= 1")

    @property
    def is_stochastic(self) -> bool:
        return self.family == "dscd"

    def label(self) -> str:
        short = {v: k for k, v in FAMILY_ALIASES.items()}[self.family]
        return f"{short}:{self.name}"


# ---------------------------------------------------------------------------
# divergences on diagonal Gaussians


def _check_dims(g1: GaussianSummary, g2: GaussianSummary) -> None:
    if g1.dim != g2.dim:
        raise ValueError(f"dimension mismatch: {g1.dim} vs {g2.dim}")


def kl_divergence(g1: GaussianSummary, g2: GaussianSummary) -> float:
    """KL(g1 || g2) for diagonal Gaussians.

    Per-dimension closed form
    ``0.5 * (v1/v2 - 1 - ln(v1/v2) + (mu2 - mu1)^2 / v2)`` summed over
    dimensions; nonnegative, zero iff the parameters coincide.
    """
    _check_dims(g1, g2)
    ratio = g1.var / g2.var
    gap = g2.mean - g1.mean
    terms = ratio - 1.0 - np.log(ratio) + gap * gap / g2.var
    return 0.5 * math.fsum(terms)


def jeffreys_divergence(g1: GaussianSummary, g2: GaussianSummary) -> float:
    """Symmetrised KL: 0.5*KL(g1||g2) + 0.5*KL(g2||g1)."""
    return 0.5 * kl_divergence(g1, g2) + 0.5 * kl_divergence(g2, g1)


# ---------------------------------------------------------------------------
# vector distances


def _as_vec(v) -> np.ndarray:
    out = np.asarray(v, dtype=np.float64)
    if out.ndim != 1 or out.shape[0] < 1:
        raise ValueError("distance inputs must be non-empty 1-D vectors")
    return out


def vector_distance(name: str, v1, v2) -> float:
    """One of the seven supported distances between two equal-length vectors.

    Correlation and cosine are 1 - similarity, in [0, 2]. Inputs that make a
    denominator vanish (zero vector for cosine, constant vector for
    correlation, sign-cancelling sums for Bray-Curtis, a shared exact zero
    for Canberra) raise :class:`DegenerateInputError` instead of silently
    returning 0.
    """
    name = _NAME_ALIASES.get(name, name)
    if name not in DISTANCE_NAMES:
        raise ConfigError(f"unknown distance {name!r}; expected one of {DISTANCE_NAMES}")
    u = _as_vec(v1)
    v = _as_vec(v2)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return float(_DISTANCE_FUNCS[name](u, v))


def _braycurtis(u, v):
    den = np.abs(u + v).sum()
    if den == 0.0:
        raise DegenerateInputError("braycurtis: |u + v| sums to zero")
    return np.abs(u - v).sum() / den


def _canberra(u, v):
    den = np.abs(u) + np.abs(v)
    if (den == 0.0).any():
        raise DegenerateInputError("canberra: |u_i| + |v_i| is zero in some dimension")
    return (np.abs(u - v) / den).sum()


def _chebyshev(u, v):
    return np.abs(u - v).max()


def _cityblock(u, v):
    return np.abs(u - v).sum()


def _cosine_sim(u, v, what):
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DegenerateInputError(f"{what}: zero-norm vector")
    # clamp: rounding can push |sim| a hair past 1
    return min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv)))


def _cosine(u, v):
    return 1.0 - _cosine_sim(u, v, "cosine")


def _correlation(u, v):
    uc = u - u.mean()
    vc = v - v.mean()
    if not uc.any() or not vc.any():
        raise DegenerateInputError("correlation: constant (zero-variance) vector")
    return 1.0 - _cosine_sim(uc, vc, "correlation")


def _euclidean(u, v):
    return np.linalg.norm(u - v)


_DISTANCE_FUNCS = {
    "braycurtis": _braycurtis,
    "canberra": _canberra,
    "chebyshev": _chebyshev,
    "cityblock": _cityblock,
    "correlation": _correlation,
    "cosine": _cosine,
    "euclidean": _euclidean,
}


# ---------------------------------------------------------------------------
# pairwise blocks (DSCD and centroid ranking)


def pairwise_distance(name: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distance between every row of ``x`` (n1, d) and of ``y`` (n2, d).

    Same semantics as :func:`vector_distance`, vectorised; used by DSCD and
    by distance-to-centroid swap selection.
    """
    name = _NAME_ALIASES.get(name, name)
    if name not in DISTANCE_NAMES:
        raise ConfigError(f"unknown distance {name!r}; expected one of {DISTANCE_NAMES}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValueError("pairwise inputs must be 2-D with equal dims")
    if name == "correlation":
        x = x - x.mean(axis=1, keepdims=True)
        y = y - y.mean(axis=1, keepdims=True)
        return _pairwise_cosine(x, y, "correlation")
    if name == "cosine":
        return _pairwise_cosine(x, y, "cosine")
    out = np.empty((x.shape[0], y.shape[0]))
    for start in range(0, x.shape[0], _PAIR_CHUNK):
        block = x[start : start + _PAIR_CHUNK, None, :]  # (c, 1, d)
        diff = np.abs(block - y[None, :, :])
        if name == "cityblock":
            out[start : start + _PAIR_CHUNK] = diff.sum(axis=2)
        elif name == "chebyshev":
            out[start : start + _PAIR_CHUNK] = diff.max(axis=2)
        elif name == "euclidean":
            out[start : start + _PAIR_CHUNK] = np.sqrt((diff * diff).sum(axis=2))
        elif name == "braycurtis":
            den = np.abs(block + y[None, :, :]).sum(axis=2)
            if (den == 0.0).any():
                raise DegenerateInputError("braycurtis: |u + v| sums to zero")
            out[start : start + _PAIR_CHUNK] = diff.sum(axis=2) / den
        elif name == "canberra":
            den = np.abs(block) + np.abs(y[None, :, :])
            if (den == 0.0).any():
                raise DegenerateInputError(
                    "canberra: |u_i| + |v_i| is zero in some dimension"
                )
            out[start : start + _PAIR_CHUNK] = (diff / den).sum(axis=2)
    return out


def _pairwise_cosine(x, y, what):
    nx = np.linalg.norm(x, axis=1)
    ny = np.linalg.norm(y, axis=1)
    if (nx == 0.0).any() or (ny == 0.0).any():
        raise DegenerateInputError(f"{what}: zero-norm vector")
    sims = (x @ y.T) / np.outer(nx, ny)
    return 1.0 - np.clip(sims, -1.0, 1.0)


def dscd_distance(
    name: str,
    g1: GaussianSummary,
    g2: GaussianSummary,
    n_samples: int,
    rng: np.random.Generator,
) -> float:
    """Average pairwise distance over samples from the two Gaussians.

    Draws ``n_samples`` vectors from each summary (independent per-dimension
    normals) and averages ``vector_distance`` over all n_samples^2 cross
    pairs. Deterministic for a fixed ``rng`` stream. Note the expected value
    is strictly positive for metrics such as Euclidean even when g1 == g2:
    two independent samples of the same distribution are still apart.
    """
    _check_dims(g1, g2)
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    x = g1.mean + np.sqrt(g1.var) * rng.standard_normal((n_samples, g1.dim))
    y = g2.mean + np.sqrt(g2.var) * rng.standard_normal((n_samples, g2.dim))
    block = pairwise_distance(name, x, y)
    return float(block.mean())


# ---------------------------------------------------------------------------
# dispatch


def score_pair(
    spec: MetricSpec,
    s1: SiblingSet,
    s2: SiblingSet,
    rng: np.random.Generator | None = None,
) -> float:
    """Metric value between two sibling sets under ``spec``.

    Fits a diagonal Gaussian to each side, then applies the divergence, the
    mean-vector distance, or the sampled DSCD distance. ``rng`` is required
    for the stochastic dscd family and ignored otherwise.
    """
    for side in (s1, s2):
        if side.is_empty:
            raise UnscorableWordError(side.lemma_key, "empty sibling set")
    g1 = fit_gaussian(s1)
    g2 = fit_gaussian(s2)
    if spec.family == "divergence":
        if spec.name == "kl12":
            return kl_divergence(g1, g2)
        if spec.name == "kl21":
            return kl_divergence(g2, g1)
        return jeffreys_divergence(g1, g2)
    if spec.family == "mean_distance":
        return vector_distance(spec.name, g1.mean, g2.mean)
    if rng is None:
        raise ConfigError("dscd metrics need an explicit rng stream")
    return dscd_distance(spec.name, g1, g2, spec.dscd_samples, rng)

import math

import numpy as np
import pytest

from sscd.corpus import SiblingSet
from sscd.errors import ConfigError
from sscd.metrics import MetricSpec
from sscd.scoring import (
    ChangeScore,
    RepetitionScore,
    bootstrap_ci,
    estimate_swap_rate,
    score_all,
    score_word,
)
from sscd.swap import SwapConfig
from sscd.synth import SynthSpec, WordProfile, generate, rate_minimum_benchmark

KL12 = MetricSpec("divergence", "kl12")
MEAN_COS = MetricSpec("mean_distance", "cosine")
MEAN_EUC = MetricSpec("mean_distance", "euclidean")


def siblings_from(rows, lemma="w", corpus="c1"):
    rows = np.asarray(rows, dtype=np.float32)
    ids = tuple(f"{corpus}-{i}" for i in range(rows.shape[0]))
    return SiblingSet(lemma, corpus, rows, ids)


def random_pair(seed, n1=60, n2=60, d=4, shift=0.0, lemma="w"):
    rng = np.random.default_rng(seed)
    s1 = siblings_from(rng.normal(size=(n1, d)) + 1.0, lemma=lemma, corpus="c1")
    s2 = siblings_from(rng.normal(size=(n2, d)) + 1.0 + shift, lemma=lemma, corpus="c2")
    return s1, s2


class TestScoreWord:
    def test_rate_zero_reports_raw_metric(self):
        s1, s2 = random_pair(0, shift=1.5)
        score = score_word(s1, s2, KL12, SwapConfig(rate=0.0), repetitions=5, base_seed=1)
        assert score.point_score == score.e_original
        assert len(score.per_rep) == 5

    def test_identical_point_mass_sets_score_exactly_zero(self):
        rows = np.tile([[2.0, -1.0, 0.5, 3.0]], (50, 1))
        s1 = siblings_from(rows, corpus="c1")
        s2 = siblings_from(rows, corpus="c2")
        score = score_word(s1, s2, MEAN_COS, SwapConfig(rate=0.4), repetitions=10, base_seed=2)
        assert score.e_original == 0.0
        assert score.point_score == 0.0
        assert all(r.e_swap == 0.0 for r in score.per_rep)

    def test_identical_sets_score_near_zero(self):
        # e_original is exactly zero; per-repetition values carry only the
        # O(1/N) noise of re-dealing a finite sample between the two sides
        rows = np.random.default_rng(1).normal(size=(500, 4)) + 2.0
        s1 = siblings_from(rows, corpus="c1")
        s2 = siblings_from(rows, corpus="c2")
        score = score_word(s1, s2, MEAN_COS, SwapConfig(rate=0.4), repetitions=10, base_seed=2)
        assert abs(score.e_original) <= 1e-12
        assert score.point_score < 1e-2

    def test_per_rep_length_and_nonnegative(self):
        s1, s2 = random_pair(3, shift=0.5)
        score = score_word(s1, s2, KL12, SwapConfig(rate=0.4), repetitions=7, base_seed=4)
        assert len(score.per_rep) == 7
        assert score.point_score >= 0.0
        assert all(r.score >= 0.0 for r in score.per_rep)
        expected = math.fsum(r.score for r in score.per_rep) / 7
        assert score.point_score == expected

    def test_changed_word_outscores_stable_word(self):
        # planted oracle: N(0, I4) vs N(3*1, I4) against a stable planted pair
        wins = 0
        for trial in range(20):
            spec = SynthSpec(
                profiles=(
                    WordProfile("mean_shift", amount=3.0, n1=200, n2=200),
                    WordProfile("stable", n1=200, n2=200),
                ),
                dim=4,
                seed=trial,
            )
            bench = generate(spec)
            (c1, c2), (s1, s2) = bench.pairs()
            cfg = SwapConfig(rate=0.4)
            changed = score_word(c1, c2, KL12, cfg, repetitions=20, base_seed=trial)
            stable = score_word(s1, s2, KL12, cfg, repetitions=20, base_seed=trial)
            wins += changed.point_score > stable.point_score
        assert wins >= 19

    def test_repetition_streams_are_independent(self):
        # per_rep[k] only depends on (seed, lemma, k): a shorter run is a prefix
        s1, s2 = random_pair(5, shift=1.0)
        long = score_word(s1, s2, KL12, SwapConfig(rate=0.5), repetitions=6, base_seed=9)
        short = score_word(s1, s2, KL12, SwapConfig(rate=0.5), repetitions=3, base_seed=9)
        assert long.per_rep[:3] == short.per_rep
        assert long.e_original == short.e_original

    def test_different_seed_changes_swaps(self):
        s1, s2 = random_pair(6, shift=1.0)
        a = score_word(s1, s2, KL12, SwapConfig(rate=0.5), repetitions=4, base_seed=0)
        b = score_word(s1, s2, KL12, SwapConfig(rate=0.5), repetitions=4, base_seed=1)
        assert a.per_rep != b.per_rep
        assert a.e_original == b.e_original  # deterministic metric family

    def test_null_pairs_score_below_shifted_pairs_on_average(self):
        null_scores, shifted_scores = [], []
        for trial in range(100):
            rng = np.random.default_rng(1000 + trial)
            base = rng.normal(size=(80, 4))
            other = rng.normal(size=(80, 4))
            s1 = siblings_from(base, corpus="c1")
            s2_null = siblings_from(other, corpus="c2")
            s2_shift = siblings_from(other + 2.0, corpus="c2")
            cfg = SwapConfig(rate=0.4)
            null_scores.append(
                score_word(s1, s2_null, KL12, cfg, 5, base_seed=trial).point_score
            )
            shifted_scores.append(
                score_word(s1, s2_shift, KL12, cfg, 5, base_seed=trial).point_score
            )
        assert np.mean(null_scores) < np.mean(shifted_scores)

    def test_repetitions_must_be_positive(self):
        s1, s2 = random_pair(7)
        with pytest.raises(ConfigError):
            score_word(s1, s2, KL12, SwapConfig(rate=0.4), repetitions=0, base_seed=0)


class TestScoreAll:
    def test_empty_input(self):
        batch = score_all([], KL12, SwapConfig(rate=0.4), 3, base_seed=0)
        assert batch.scores == () and batch.unscorable == ()

    def test_order_and_parallel_determinism(self):
        pairs = [random_pair(seed, shift=seed * 0.5, lemma=f"w{seed}") for seed in range(3)]
        serial = score_all(pairs, KL12, SwapConfig(rate=0.4), 6, base_seed=11, n_jobs=1)
        parallel = score_all(pairs, KL12, SwapConfig(rate=0.4), 6, base_seed=11, n_jobs=4)
        assert [s.lemma_key for s in serial.scores] == ["w0", "w1", "w2"]
        assert serial == parallel

    def test_unscorable_words_are_collected_not_fatal(self):
        good = random_pair(8, lemma="good")
        empty = SiblingSet("rare", "c1", np.zeros((0, 4), np.float32), ())
        other = siblings_from(np.ones((5, 4)), lemma="rare", corpus="c2")
        batch = score_all([good, (empty, other)], KL12, SwapConfig(rate=0.4), 3, base_seed=0)
        assert [s.lemma_key for s in batch.scores] == ["good"]
        assert batch.unscorable == (("rare", "empty sibling set"),)


class TestBootstrapCI:
    def make_score(self, values):
        reps = tuple(RepetitionScore(e_swap=v, score=v) for v in values)
        return ChangeScore("w", 0.0, reps, float(np.mean(values)))

    def test_constant_scores_collapse_interval(self):
        score = self.make_score([0.7] * 12)
        low, high = bootstrap_ci(score, 0.95, 2000, np.random.default_rng(0))
        assert low == high
        assert low == pytest.approx(0.7, rel=1e-12)

    def test_all_zero_scores(self):
        score = self.make_score([0.0] * 8)
        assert bootstrap_ci(score, 0.95, 500, np.random.default_rng(1)) == (0.0, 0.0)

    def test_clt_width_on_uniform_scores(self):
        # CLT oracle: half-width about 1.96 * sigma / sqrt(20) = 0.127 +- 30%
        draws = np.random.default_rng(12).uniform(0.0, 1.0, size=20)
        score = self.make_score(list(draws))
        low, high = bootstrap_ci(score, 0.95, 10_000, np.random.default_rng(2))
        assert low < 0.5 < high
        half_width = (high - low) / 2.0
        assert 0.127 * 0.7 <= half_width <= 0.127 * 1.3

    def test_needs_two_repetitions(self):
        score = self.make_score([0.5])
        with pytest.raises(ConfigError):
            bootstrap_ci(score, 0.95, 100, np.random.default_rng(0))

    def test_level_validation(self):
        score = self.make_score([0.1, 0.2, 0.3])
        with pytest.raises(ConfigError):
            bootstrap_ci(score, 1.5, 100, np.random.default_rng(0))


GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


class TestEstimateSwapRate:
    def test_point_mass_word_ties_to_smallest_rate(self):
        rows = np.tile([[1.0, 2.0]], (30, 1))
        s1 = siblings_from(rows, corpus="c1")
        s2 = siblings_from(rows, corpus="c2")
        result = estimate_swap_rate(
            [(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), GRID, repetitions=4, base_seed=0
        )
        assert all(v == 0.0 for v in result.mean_e_swap)
        assert result.estimated_rate == 0.1

    def test_stable_word_has_small_e_swap_everywhere(self):
        rows = np.random.default_rng(0).normal(size=(400, 4))
        s1 = siblings_from(rows, corpus="c1")
        s2 = siblings_from(rows, corpus="c2")
        result = estimate_swap_rate(
            [(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), GRID, repetitions=5, base_seed=1
        )
        assert max(result.mean_e_swap) < 0.5

    def test_recovers_planted_interior_minimum(self):
        bench = generate(rate_minimum_benchmark(n_words=4, n_small=100, dim=4, seed=3))
        result = estimate_swap_rate(
            bench.pairs(), MEAN_EUC, SwapConfig(rate=0.5), GRID, repetitions=5, base_seed=3
        )
        assert result.estimated_rate == 0.6

    def test_grid_of_one(self):
        s1, s2 = random_pair(9)
        result = estimate_swap_rate(
            [(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), (0.3,), repetitions=2, base_seed=0
        )
        assert result.estimated_rate == 0.3 and len(result.mean_e_swap) == 1

    def test_excludes_unscorable_words(self):
        good = random_pair(10, lemma="good")
        empty = SiblingSet("rare", "c1", np.zeros((0, 4), np.float32), ())
        other = siblings_from(np.ones((5, 4)), lemma="rare", corpus="c2")
        result = estimate_swap_rate(
            [good, (empty, other)], MEAN_EUC, SwapConfig(rate=0.5), (0.2, 0.4), 2, 0
        )
        assert result.excluded == ("rare",)

    def test_deterministic(self):
        pairs = [random_pair(11, shift=1.0)]
        a = estimate_swap_rate(pairs, MEAN_EUC, SwapConfig(rate=0.5), GRID, 3, base_seed=5)
        b = estimate_swap_rate(pairs, MEAN_EUC, SwapConfig(rate=0.5), GRID, 3, base_seed=5)
        assert a == b

    def test_grid_validation(self):
        s1, s2 = random_pair(12)
        with pytest.raises(ConfigError):
            estimate_swap_rate([(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), (), 2, 0)
        with pytest.raises(ConfigError):
            estimate_swap_rate([(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), (0.0, 0.5), 2, 0)
        with pytest.raises(ConfigError):
            estimate_swap_rate([(s1, s2)], MEAN_EUC, SwapConfig(rate=0.5), (0.5, 0.5), 2, 0)
        with pytest.raises(ConfigError):
            estimate_swap_rate([], MEAN_EUC, SwapConfig(rate=0.5), (0.5,), 2, 0)

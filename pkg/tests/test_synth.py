import numpy as np
import pytest

from oracles import dense_gaussian_kl
from sscd.corpus import check_manifest_consistency, load_gold, load_manifest, load_sibling_set, sibling_path
from sscd.errors import ConfigError
from sscd.gaussian import fit_moments
from sscd.metrics import kl_divergence, vector_distance
from sscd.synth import (
    SynthSpec,
    WordProfile,
    generate,
    graded_benchmark,
    rate_minimum_benchmark,
    stable_benchmark,
    write_benchmark,
)


class TestProfiles:
    def test_kind_validation(self):
        with pytest.raises(ConfigError):
            WordProfile("drift")
        with pytest.raises(ConfigError):
            WordProfile("mean_shift", amount=-1.0)
        with pytest.raises(ConfigError):
            WordProfile("var_shift", amount=0.0)
        with pytest.raises(ConfigError):
            WordProfile("sense_gain", amount=1.5)

    def test_default_gold_is_monotone_in_effect(self):
        assert WordProfile("stable").gold_score() == 0.0
        assert WordProfile("mean_shift", 2.0).gold_score() == 2.0
        assert WordProfile("var_shift", 4.0).gold_score() > WordProfile("var_shift", 2.0).gold_score()
        assert WordProfile("sense_gain", 0.5).gold_score() == 0.5

    def test_gold_ties_require_identical_profiles(self):
        with pytest.raises(ConfigError, match="gold"):
            SynthSpec(
                profiles=(
                    WordProfile("mean_shift", amount=0.5),
                    WordProfile("sense_gain", amount=0.5),
                )
            )
        # identical profiles may tie
        SynthSpec(profiles=(WordProfile("stable"), WordProfile("stable")))


class TestGenerate:
    def test_regeneration_is_bit_identical(self):
        spec = graded_benchmark(n_stable=4, per_delta=1, seed=9)
        a = generate(spec)
        b = generate(spec)
        for lemma in a.siblings1:
            assert a.siblings1[lemma].vectors.tobytes() == b.siblings1[lemma].vectors.tobytes()
            assert a.siblings2[lemma].vectors.tobytes() == b.siblings2[lemma].vectors.tobytes()
        assert a.gold == b.gold

    def test_stable_words_share_generators(self):
        bench = generate(stable_benchmark(n_words=3, seed=1))
        for gen in bench.generators:
            np.testing.assert_array_equal(gen.corpus1.mean, gen.corpus2.mean)
            np.testing.assert_array_equal(gen.corpus1.var, gen.corpus2.var)

    def test_mean_gap_grows_with_delta(self):
        # law of large numbers: fitted mean distance tracks the planted shift
        gaps = []
        filler = WordProfile("stable", n1=2, n2=2, gold=-1.0)
        for delta in (0.0, 1.0, 2.0, 4.0):
            kind = "mean_shift" if delta else "stable"
            spec = SynthSpec(
                profiles=(WordProfile(kind, amount=delta, n1=4000, n2=4000), filler),
                dim=8,
                seed=17,
            )
            bench = generate(spec)
            s1, s2 = bench.pairs()[0]
            mean1, _ = fit_moments(s1.vectors)
            mean2, _ = fit_moments(s2.vectors)
            gaps.append(vector_distance("euclidean", mean1, mean2))
        assert gaps == sorted(gaps)
        assert gaps[-1] > gaps[0] + 1.0

    def test_forty_word_benchmark_shape(self):
        bench = generate(graded_benchmark(seed=5))
        assert len(bench.gold.entries) == 40
        assert len(bench.siblings1) == 40
        assert bench.manifest1.embedding_dim == 16
        again = generate(graded_benchmark(seed=5))
        assert bench.gold == again.gold

    def test_counts_respect_range_and_manifest_totals(self):
        bench = generate(stable_benchmark(n_words=10, n_range=(50, 500), seed=2))
        for _, count in bench.manifest1.words:
            assert 50 <= count <= 500
        assert bench.manifest1.total_sentences >= max(c for _, c in bench.manifest1.words)

    def test_sense_gain_mixes_components(self):
        spec = SynthSpec(
            profiles=(
                WordProfile("sense_gain", amount=0.5, offset=8.0, n1=2000, n2=2000),
                WordProfile("stable", n1=2, n2=2),
            ),
            dim=4,
            seed=3,
        )
        bench = generate(spec)
        gen = bench.generators[0]
        s1, s2 = bench.pairs()[0]
        mean2 = s2.vectors.astype(np.float64).mean(axis=0)
        expected = 0.5 * gen.corpus1.mean + 0.5 * gen.sense_mean
        assert np.all(np.abs(mean2 - expected) < 0.5)

    def test_planted_kl_matches_closed_form_oracle(self):
        spec = SynthSpec(
            profiles=(WordProfile("mean_shift", amount=1.5), WordProfile("stable")),
            dim=6,
            seed=21,
        )
        gen = generate(spec).generators[0]
        expected = dense_gaussian_kl(
            gen.corpus1.mean, np.diag(gen.corpus1.var), gen.corpus2.mean, np.diag(gen.corpus2.var)
        )
        assert kl_divergence(gen.corpus1, gen.corpus2) == pytest.approx(expected, rel=1e-12)


class TestWriteBenchmark:
    def test_files_round_trip_through_standard_loaders(self, tmp_path):
        bench = generate(graded_benchmark(n_stable=3, per_delta=1, seed=7))
        paths = write_benchmark(bench, tmp_path)
        m1 = load_manifest(paths["corpus1"] / "manifest.json")
        check_manifest_consistency(m1, paths["corpus1"])
        for lemma, sset in bench.siblings1.items():
            loaded = load_sibling_set(
                sibling_path(paths["corpus1"], lemma), expected_dim=m1.embedding_dim
            )
            assert loaded.vectors.tobytes() == sset.vectors.tobytes()
        gold = load_gold(paths["gold"])
        assert gold.lemmas() == bench.gold.lemmas()
        targets = paths["targets"].read_text().split()
        assert targets == list(bench.gold.lemmas())

    def test_rate_minimum_sizes(self):
        bench = generate(rate_minimum_benchmark(n_words=2, n_small=100, size_ratio=1.5))
        for _, count in bench.manifest1.words:
            assert count == 100
        for _, count in bench.manifest2.words:
            assert count == 150

"""Extraction tests, including the cross-package round-trip acceptance check.

The scoring package (``sscd``) is imported here only to prove that emitted
files satisfy the consumer's loaders; the extractor itself never depends
on it.
"""

import json
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import TARGETS, TOY_SENTENCES
from sscd_extractor.cli import main
from sscd_extractor.extract import ExtractionConfig, extract


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}", flush=True)
        raise
    print(f"[PASS] {name}", flush=True)


def run_extract(model_dir, corpus, targets, out, **kw):
    config = ExtractionConfig(
        corpus_path=str(corpus),
        targets=targets,
        out_dir=str(out),
        model=str(model_dir),
        corpus_id="toy-c1",
        epoch_label="t1",
        **kw,
    )
    return extract(config)


def scan_count(corpus_path, lemma):
    total = 0
    with open(corpus_path, encoding="utf-8") as f:
        for line in f:
            total += line.split().count(lemma)
    return total


class TestExtractionRoundTrip:
    def test_acceptance_round_trip(self, tiny_model_dir, toy_corpus, tmp_path):
        with criterion(
            "extraction round trip (primary-side load, scan counts, determinism)"
        ):
            corpus, _ = toy_corpus
            out1 = tmp_path / "run1"
            out2 = tmp_path / "run2"
            result = run_extract(tiny_model_dir, corpus, TARGETS, out1)
            run_extract(tiny_model_dir, corpus, TARGETS, out2)

            # emitted files satisfy the scoring package's loaders and checks
            from sscd.corpus import (
                check_manifest_consistency,
                load_manifest,
                load_sibling_set,
                sibling_path,
            )

            manifest = load_manifest(out1 / "manifest.json")
            check_manifest_consistency(manifest, out1)
            assert manifest.embedding_dim == 32
            assert manifest.total_sentences == len(TOY_SENTENCES)

            for lemma in TARGETS:
                siblings = load_sibling_set(
                    sibling_path(out1, lemma), expected_dim=manifest.embedding_dim
                )
                expected = scan_count(corpus, lemma)
                assert siblings.n == expected == result.counts[lemma]
                assert manifest.occurrence_count(lemma) == expected
                assert np.isfinite(siblings.vectors).all()

            # byte-for-byte determinism across two runs
            for lemma in TARGETS:
                name = result.files[lemma].name
                assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
            assert (out1 / "manifest.json").read_bytes() == (
                out2 / "manifest.json"
            ).read_bytes()

    def test_repeated_sentences_give_identical_rows(self, tiny_model_dir, tmp_path):
        corpus = tmp_path / "dup.txt"
        corpus.write_text("the cell was old\nthe cell was old\n", encoding="utf-8")
        out = tmp_path / "out"
        result = run_extract(tiny_model_dir, corpus, ("cell",), out)
        assert result.counts["cell"] == 2
        from sscd.corpus import load_sibling_set, sibling_path

        siblings = load_sibling_set(sibling_path(out, "cell"))
        assert siblings.vectors[0].tobytes() == siblings.vectors[1].tobytes()

    def test_multiple_occurrences_in_one_sentence(self, tiny_model_dir, tmp_path):
        corpus = tmp_path / "multi.txt"
        corpus.write_text("the cell and the cell phone\n", encoding="utf-8")
        out = tmp_path / "out"
        result = run_extract(tiny_model_dir, corpus, ("cell",), out)
        assert result.counts["cell"] == 2

    def test_absent_target_gets_empty_file(self, tiny_model_dir, tmp_path, capsys):
        corpus = tmp_path / "small.txt"
        corpus.write_text("the word is new\n", encoding="utf-8")
        out = tmp_path / "out"
        result = run_extract(tiny_model_dir, corpus, ("cell",), out)
        assert result.counts["cell"] == 0
        assert "never occurs" in capsys.readouterr().err
        from sscd.corpus import load_sibling_set, sibling_path

        assert load_sibling_set(sibling_path(out, "cell")).is_empty


class TestEncodingPolicies:
    def test_sum_is_exactly_four_times_mean(self, tiny_model_dir, toy_corpus, tmp_path):
        corpus, _ = toy_corpus
        mean_run = run_extract(tiny_model_dir, corpus, ("cell",), tmp_path / "mean",
                               combine="mean")
        sum_run = run_extract(tiny_model_dir, corpus, ("cell",), tmp_path / "sum",
                              combine="sum")
        from sscd.corpus import load_sibling_set

        mean_vecs = load_sibling_set(mean_run.files["cell"]).vectors
        sum_vecs = load_sibling_set(sum_run.files["cell"]).vectors
        assert np.array_equal(sum_vecs, mean_vecs * 4.0)

    def test_long_sentence_is_window_centered(self, tiny_model_dir, tmp_path):
        filler = ["word"] * 60
        line = " ".join(filler + ["cell"] + filler)
        corpus = tmp_path / "long.txt"
        corpus.write_text(line + "\n", encoding="utf-8")
        out = tmp_path / "out"
        result = run_extract(
            tiny_model_dir, corpus, ("cell",), out, max_length=16
        )
        # occurrence is kept despite the sentence exceeding the window
        assert result.counts["cell"] == 1
        assert result.skipped == {}

    def test_window_matches_manual_crop(self, tiny_model_dir, tmp_path):
        # encoding the pre-cropped sentence must give the same vector;
        # the window grows toward the closer side, left on ties, so a
        # 14-piece budget around position 10 keeps 7 left and 6 right
        words = ["word"] * 10 + ["cell"] + ["word"] * 10
        budget = 16 - 2
        left = (budget - 1) - (budget - 1) // 2
        right = (budget - 1) // 2
        cropped = words[10 - left : 10 + right + 1]
        long_corpus = tmp_path / "long.txt"
        long_corpus.write_text(" ".join(words) + "\n", encoding="utf-8")
        crop_corpus = tmp_path / "crop.txt"
        crop_corpus.write_text(" ".join(cropped) + "\n", encoding="utf-8")
        long_run = run_extract(tiny_model_dir, long_corpus, ("cell",),
                               tmp_path / "a", max_length=16)
        crop_run = run_extract(tiny_model_dir, crop_corpus, ("cell",),
                               tmp_path / "b", max_length=16)
        from sscd.corpus import load_sibling_set

        long_vec = load_sibling_set(long_run.files["cell"]).vectors
        crop_vec = load_sibling_set(crop_run.files["cell"]).vectors
        assert long_vec.tobytes() == crop_vec.tobytes()

    def test_unalignable_occurrence_is_skipped_and_reported(
        self, tiny_model_dir, tmp_path
    ):
        # a zero-width space normalises to zero wordpieces
        ghost = "​"
        corpus = tmp_path / "ghost.txt"
        corpus.write_text(f"the {ghost} cell\n", encoding="utf-8")
        out = tmp_path / "out"
        result = run_extract(tiny_model_dir, corpus, (ghost, "cell"), out)
        assert result.counts["cell"] == 1
        assert result.counts[ghost] == 0
        assert result.skipped == {ghost: 1}
        skips = json.loads((out / "skips.json").read_text())
        assert skips["total"] == 1

    def test_subword_words_still_align(self, tiny_model_dir, tmp_path):
        # "words" splits into "word" + "##s" in the tiny vocab; pieces average
        corpus = tmp_path / "sub.txt"
        corpus.write_text("the words was old\n", encoding="utf-8")
        result = run_extract(tiny_model_dir, corpus, ("words",), tmp_path / "out")
        assert result.counts["words"] == 1
        assert result.skipped == {}


class TestScoringPipelineIntegration:
    def test_emitted_corpora_drive_the_scoring_cli(
        self, tiny_model_dir, toy_corpus, tmp_path
    ):
        import csv
        import subprocess
        import sys

        corpus1, targets = toy_corpus
        corpus2 = tmp_path / "toy2.txt"
        # reshuffled second epoch with different target contexts
        lines = corpus1.read_text().splitlines()
        corpus2.write_text("\n".join(reversed(lines)) + "\n", encoding="utf-8")
        c1, c2 = tmp_path / "c1", tmp_path / "c2"
        run_extract(tiny_model_dir, corpus1, TARGETS, c1)
        run_extract(tiny_model_dir, corpus2, TARGETS, c2)
        out = tmp_path / "run"
        proc = subprocess.run(
            [
                sys.executable, "-m", "sscd", "score",
                "--corpus1", str(c1), "--corpus2", str(c2),
                "--targets", str(targets),
                "--family", "mean", "--metric", "cosine",
                "--swap-rate", "0.4", "--repetitions", "3",
                "--out", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        with open(out / "scores_mean_cosine_rate0.4.csv", newline="") as f:
            rows = list(csv.reader(f))
        assert len(rows) == 1 + len(TARGETS)


class TestConfigValidation:
    def test_bad_values_rejected(self):
        with pytest.raises(ValueError):
            ExtractionConfig(corpus_path="x", targets=("a",), out_dir="y", combine="max")
        with pytest.raises(ValueError):
            ExtractionConfig(corpus_path="x", targets=(), out_dir="y")
        with pytest.raises(ValueError):
            ExtractionConfig(corpus_path="x", targets=("a",), out_dir="y", max_length=4)
        with pytest.raises(ValueError):
            ExtractionConfig(corpus_path="x", targets=("a",), out_dir="y",
                             corpus_format="csv")


class TestCli:
    def test_extract_command(self, tiny_model_dir, toy_corpus, tmp_path, capsys):
        corpus, targets = toy_corpus
        out = tmp_path / "cli-out"
        code = main(
            [
                "extract",
                "--model", str(tiny_model_dir),
                "--corpus", str(corpus),
                "--targets", str(targets),
                "--out", str(out),
                "--corpus-id", "toy",
                "--epoch", "t1",
            ]
        )
        assert code == 0
        assert (out / "manifest.json").exists()
        assert (out / "skips.json").exists()
        assert "extracted" in capsys.readouterr().out

    def test_preprocess_command(self, tmp_path, capsys):
        export = tmp_path / "export.json"
        export.write_text(
            '{"body": "First one. Second one!"}\n{"body": ""}\n', encoding="utf-8"
        )
        out = tmp_path / "corpus.txt"
        assert main(["preprocess-liverpool", "--input", str(export), "--out", str(out)]) == 0
        assert out.read_text().count("\n") == 2
        err = capsys.readouterr().err
        assert "skipped 1" in err

    def test_missing_input_is_error(self, tmp_path):
        assert (
            main(
                ["preprocess-liverpool", "--input", str(tmp_path / "none.json"),
                 "--out", str(tmp_path / "o.txt")]
            )
            == 2
        )

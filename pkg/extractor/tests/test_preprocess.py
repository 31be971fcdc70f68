import json

import pytest

from sscd_extractor.corpus_io import (
    preprocess_liverpool,
    read_tokenized,
    split_sentences,
    tokenize,
    write_tokenized,
)


def write_records(tmp_path, records, as_array=False):
    path = tmp_path / "export.json"
    if as_array:
        path.write_text(json.dumps(records), encoding="utf-8")
    else:
        path.write_text(
            "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
        )
    return path


def test_two_sentence_body_gives_two_lines(tmp_path):
    path = write_records(
        tmp_path, [{"author": "x", "body": "We won the match. What a night!"}]
    )
    sentences, skipped = preprocess_liverpool(path)
    assert skipped == 0
    assert len(sentences) == 2
    assert sentences[0] == ["We", "won", "the", "match", "."]
    assert sentences[1] == ["What", "a", "night", "!"]


def test_empty_body_is_skipped_with_count(tmp_path):
    path = write_records(
        tmp_path,
        [{"body": ""}, {"author": "y"}, {"body": "One sentence here."}],
    )
    sentences, skipped = preprocess_liverpool(path)
    assert skipped == 2
    assert len(sentences) == 1


def test_tokens_kept_verbatim(tmp_path):
    path = write_records(tmp_path, [{"body": "The pharaoh Scored Twice."}])
    sentences, _ = preprocess_liverpool(path)
    assert "pharaoh" in sentences[0]
    assert "Scored" in sentences[0]  # no case folding


def test_json_array_input(tmp_path):
    path = write_records(tmp_path, [{"body": "Short one."}], as_array=True)
    sentences, skipped = preprocess_liverpool(path)
    assert len(sentences) == 1 and skipped == 0


def test_bad_record_raises(tmp_path):
    path = tmp_path / "export.json"
    path.write_text('{"body": "fine."}\nnot-json\n', encoding="utf-8")
    with pytest.raises(ValueError, match="bad JSON record"):
        preprocess_liverpool(path)


def test_round_trip_through_tokenized_file(tmp_path):
    sentences = [["a", "b", "."], ["c", "d", "!"]]
    out = tmp_path / "corpus.txt"
    write_tokenized(out, sentences)
    assert read_tokenized(out) == sentences


def test_sentence_splitting_and_tokenizing():
    assert split_sentences("One. Two! Three?") == ["One.", "Two!", "Three?"]
    assert tokenize("don't stop") == ["don", "'", "t", "stop"]

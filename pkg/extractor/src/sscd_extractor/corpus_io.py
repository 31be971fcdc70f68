"""Corpus readers: pre-tokenized text files and raw forum exports.

The pre-tokenized format is one sentence per line with whitespace-separated
tokens. Forum exports (one JSON record per line, or a top-level JSON array)
carry the text in a ``body`` field plus assorted metadata; preprocessing
keeps only the body text, splits it into sentences, and tokenises each into
the same one-sentence-per-line layout. Tokens are kept verbatim; no case
folding happens here.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

CORPUS_FORMATS = ("semeval_tokenized", "liverpool_json")

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def read_tokenized(path: str | Path) -> list[list[str]]:
    """Read a pre-tokenized corpus: one sentence per line, tokens by spaces."""
    sentences = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    return sentences


def split_sentences(text: str) -> list[str]:
    parts = [p.strip() for p in _SENTENCE_BREAK.split(text)]
    return [p for p in parts if p]


def tokenize(sentence: str) -> list[str]:
    return _TOKEN.findall(sentence)


def _iter_records(path: Path):
    raw = path.read_text(encoding="utf-8").strip()
    if not raw:
        return
    if raw.startswith("["):
        yield from json.loads(raw)
        return
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: bad JSON record: {exc}") from exc


def preprocess_liverpool(path: str | Path) -> tuple[list[list[str]], int]:
    """Turn a forum export into tokenized sentences.

    Returns (sentences, skipped) where ``skipped`` counts records without
    usable body text.
    """
    sentences: list[list[str]] = []
    skipped = 0
    for record in _iter_records(Path(path)):
        body = record.get("body") if isinstance(record, dict) else None
        if not body or not str(body).strip():
            skipped += 1
            continue
        for sentence in split_sentences(str(body)):
            tokens = tokenize(sentence)
            if tokens:
                sentences.append(tokens)
    return sentences, skipped


def write_tokenized(path: str | Path, sentences: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for tokens in sentences:
            f.write(" ".join(tokens) + "\n")


def load_corpus(path: str | Path, corpus_format: str) -> tuple[list[list[str]], int]:
    """Read a corpus in either format; returns (sentences, skipped_records)."""
    if corpus_format not in CORPUS_FORMATS:
        raise ValueError(f"unknown corpus format {corpus_format!r}; expected {CORPUS_FORMATS}")
    if corpus_format == "semeval_tokenized":
        return read_tokenized(path), 0
    return preprocess_liverpool(path)

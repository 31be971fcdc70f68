"""Sibling-embedding extraction with a pretrained masked language model.

For every occurrence of every target word the extractor emits one vector:
the token embeddings of the last four encoder layers are combined (mean or
sum) and the subword pieces of the occurrence are averaged. Sentences whose
piece count exceeds the model's window are shortened to a word window
centered on the occurrence. Occurrences the tokenizer cannot align (words
that normalise to zero pieces) are skipped and counted in the skip report;
targets that never occur produce a valid empty sibling file.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .corpus_io import CORPUS_FORMATS, load_corpus
from .sibling_writer import (
    sibling_filename,
    write_manifest,
    write_sibling_file,
    write_skip_report,
)

LAST_LAYERS = 4

COMBINE_MODES = ("mean", "sum")


@dataclass(frozen=True)
class ExtractionConfig:
    corpus_path: str
    targets: tuple[str, ...]
    out_dir: str
    model: str = "bert-base-multilingual-cased"
    corpus_format: str = "semeval_tokenized"
    combine: str = "mean"
    max_length: int = 512
    batch_size: int = 32
    corpus_id: str = ""
    epoch_label: str = ""
    device: str = "cpu"

    def __post_init__(self):
        if self.combine not in COMBINE_MODES:
            raise ValueError(f"combine must be one of {COMBINE_MODES}")
        if self.corpus_format not in CORPUS_FORMATS:
            raise ValueError(f"corpus_format must be one of {CORPUS_FORMATS}")
        if self.max_length < 8:
            raise ValueError("max_length must be >= 8")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.targets:
            raise ValueError("no target words given")
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass
class _Instance:
    lemma: str
    sentence_idx: int
    position: int       # token index of the occurrence in the sentence
    words: list[str]    # window handed to the encoder
    target_idx: int     # occurrence index inside the window


@dataclass
class ExtractionResult:
    out_dir: Path
    counts: dict[str, int]
    skipped: dict[str, int]
    total_sentences: int
    embedding_dim: int
    files: dict[str, Path] = field(default_factory=dict)


def _piece_count(word: str, tokenizer, cache: dict[str, int]) -> int:
    # WordPiece on a pre-split word is context independent, so caching by
    # surface form is exact
    count = cache.get(word)
    if count is None:
        count = len(tokenizer.tokenize(word))
        cache[word] = count
    return count


def _center_window(
    words: list[str], position: int, budget: int, tokenizer, cache: dict[str, int]
) -> tuple[list[str], int] | None:
    """Largest word window around ``position`` within ``budget`` pieces.

    Grows the window one word at a time toward whichever side currently
    sits closer to the occurrence (left on ties), which keeps it centered.
    Returns None when the occurrence itself cannot be encoded.
    """
    counts = [_piece_count(w, tokenizer, cache) for w in words]
    if counts[position] == 0 or counts[position] > budget:
        return None
    lo = hi = position
    total = counts[position]
    while True:
        left_gap = position - lo
        right_gap = hi - position
        candidates = []
        if lo > 0:
            candidates.append((left_gap, 0, lo - 1))
        if hi < len(words) - 1:
            candidates.append((right_gap, 1, hi + 1))
        candidates.sort()
        extended = False
        for _, side, idx in candidates:
            if total + counts[idx] <= budget:
                total += counts[idx]
                if side == 0:
                    lo = idx
                else:
                    hi = idx
                extended = True
                break
        if not extended:
            return words[lo : hi + 1], position - lo


def _collect_instances(
    sentences: list[list[str]],
    targets: tuple[str, ...],
    tokenizer,
    max_length: int,
    skipped: Counter,
) -> list[_Instance]:
    target_set = set(targets)
    budget = max_length - 2  # room for the two special tokens
    cache: dict[str, int] = {}
    instances = []
    for sentence_idx, words in enumerate(sentences):
        if not target_set.intersection(words):
            continue
        for position, word in enumerate(words):
            if word not in target_set:
                continue
            window = _center_window(words, position, budget, tokenizer, cache)
            if window is None:
                skipped[word] += 1
                continue
            instances.append(
                _Instance(
                    lemma=word,
                    sentence_idx=sentence_idx,
                    position=position,
                    words=window[0],
                    target_idx=window[1],
                )
            )
    return instances


def _encode_batch(instances, tokenizer, model, device, combine, max_length, skipped):
    encoding = tokenizer(
        [inst.words for inst in instances],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    ).to(device)
    with torch.no_grad():
        output = model(**encoding)
    stacked = torch.stack(output.hidden_states[-LAST_LAYERS:], dim=0)
    combined = stacked.sum(dim=0)
    if combine == "mean":
        combined = combined * 0.25
    vectors = []
    for i, inst in enumerate(instances):
        word_ids = encoding.word_ids(i)
        piece_rows = [p for p, w in enumerate(word_ids) if w == inst.target_idx]
        if not piece_rows:
            skipped[inst.lemma] += 1
            vectors.append(None)
            continue
        pieces = combined[i, piece_rows, :]
        vectors.append(pieces.mean(dim=0).cpu().numpy().astype(np.float32))
    return vectors


def extract(config: ExtractionConfig) -> ExtractionResult:
    """Run the full extraction and write sibling files, manifest, skips."""
    sentences, dropped_records = load_corpus(config.corpus_path, config.corpus_format)
    if dropped_records:
        print(f"warning: {dropped_records} record(s) without body text", file=sys.stderr)

    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = AutoModel.from_pretrained(config.model, output_hidden_states=True)
    depth = model.config.num_hidden_layers
    if depth < LAST_LAYERS:
        raise ValueError(f"model has {depth} layers; need at least {LAST_LAYERS}")
    model.to(config.device)
    model.eval()

    skipped: Counter = Counter()
    instances = _collect_instances(
        sentences, config.targets, tokenizer, config.max_length, skipped
    )

    by_lemma: dict[str, list[tuple[np.ndarray, str]]] = {t: [] for t in config.targets}
    for start in range(0, len(instances), config.batch_size):
        batch = instances[start : start + config.batch_size]
        vectors = _encode_batch(
            batch, tokenizer, model, config.device, config.combine,
            config.max_length, skipped,
        )
        for inst, vec in zip(batch, vectors):
            if vec is None:
                continue
            sid = f"s{inst.sentence_idx:08d}:{inst.position}"
            by_lemma[inst.lemma].append((vec, sid))

    dim = int(model.config.hidden_size)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    files = {}
    for lemma in config.targets:
        rows = by_lemma[lemma]
        if rows:
            matrix = np.stack([vec for vec, _ in rows]).astype(np.float32)
        else:
            matrix = np.zeros((0, dim), dtype=np.float32)
            print(f"warning: target {lemma!r} never occurs in the corpus", file=sys.stderr)
        path = out_dir / sibling_filename(lemma)
        write_sibling_file(path, matrix, [sid for _, sid in rows])
        counts[lemma] = len(rows)
        files[lemma] = path

    corpus_id = config.corpus_id or Path(config.corpus_path).stem
    write_manifest(
        out_dir / "manifest.json",
        corpus_id=corpus_id,
        epoch_label=config.epoch_label,
        total_sentences=len(sentences),
        embedding_dim=dim,
        word_counts=[(lemma, counts[lemma]) for lemma in config.targets],
    )
    write_skip_report(out_dir / "skips.json", dict(skipped))
    return ExtractionResult(
        out_dir=out_dir,
        counts=counts,
        skipped=dict(skipped),
        total_sentences=len(sentences),
        embedding_dim=dim,
        files=files,
    )

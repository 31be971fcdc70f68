"""Writers for the sibling-embedding file format and corpus manifest.

The format is the scoring pipeline's input contract (little-endian): magic
``SSCD``, u32 version (=1), u32 N, u32 d, N*d float32 row-major, then N
sentence ids, each a u32 byte length followed by UTF-8 bytes. The manifest
is one JSON document per corpus. Files are written to a temp path and
renamed, so a crashed extraction never leaves a half-written file behind.
"""

from __future__ import annotations

import json
import os
import struct
import urllib.parse
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"SSCD"
FORMAT_VERSION = 1


def sibling_filename(lemma_key: str) -> str:
    """Filesystem-safe (percent-encoded) file name for a lemma."""
    return urllib.parse.quote(lemma_key, safe="") + ".sscd"


def write_sibling_file(
    path: str | Path,
    vectors: np.ndarray,
    sentence_ids: Sequence[str],
) -> None:
    path = Path(path)
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2:
        raise ValueError(f"vectors must be 2-D, got shape {vectors.shape}")
    n, dim = vectors.shape
    if len(sentence_ids) != n:
        raise ValueError(f"{len(sentence_ids)} ids for {n} vectors")
    if not np.isfinite(vectors).all():
        raise ValueError("refusing to write non-finite vectors")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", FORMAT_VERSION, n, dim))
        f.write(vectors.tobytes(order="C"))
        for sid in sentence_ids:
            raw = sid.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
    os.replace(tmp, path)


def write_manifest(
    path: str | Path,
    corpus_id: str,
    epoch_label: str,
    total_sentences: int,
    embedding_dim: int,
    word_counts: Sequence[tuple[str, int]],
) -> None:
    doc = {
        "corpus_id": corpus_id,
        "epoch_label": epoch_label,
        "total_sentences": total_sentences,
        "embedding_dim": embedding_dim,
        "words": [[w, c] for w, c in word_counts],
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def write_skip_report(path: str | Path, skipped: dict[str, int]) -> None:
    doc = {
        "skipped_occurrences": dict(sorted(skipped.items())),
        "total": sum(skipped.values()),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

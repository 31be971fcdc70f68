"""Target words, sibling embedding sets, corpus manifests, and gold rankings.

On-disk formats (all little-endian):

- sibling file (one per word and corpus): magic ``SSCD``, u32 version (=1),
  u32 N, u32 d, then N*d float32 values row-major, then N sentence ids,
  each a u32 byte length followed by that many UTF-8 bytes.
- manifest: one JSON document per corpus, see :class:`CorpusManifest`.
- gold: tab-separated ``word<TAB>score`` lines; an optional third 0/1
  column is read as a binary change label.

Loaders are pure functions of file content and all loaded types are
immutable, so they are safe to share across threads.
"""

from __future__ import annotations

import json
import struct
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import GoldFormatError, ManifestError, SiblingFormatError

MAGIC = b"SSCD"
FORMAT_VERSION = 1

GOLD_FORMATS = ("semeval_graded", "liverpool")


@dataclass(frozen=True)
class TargetWord:
    """A word under investigation; ``lemma_key`` joins corpora and gold."""

    surface: str
    lemma_key: str

    def __post_init__(self):
        if not self.surface or not self.lemma_key:
            raise ValueError("surface and lemma_key must be non-empty")


@dataclass(frozen=True)
class CorpusManifest:
    """Per-corpus metadata: identity, size, and per-word occurrence counts."""

    corpus_id: str
    epoch_label: str
    total_sentences: int
    embedding_dim: int
    words: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.embedding_dim <= 0:
            raise ManifestError(f"embedding_dim must be > 0, got {self.embedding_dim}")
        counts = [c for _, c in self.words]
        if any(c < 0 for c in counts):
            raise ManifestError("occurrence counts must be >= 0")
        if counts and self.total_sentences < max(counts):
            raise ManifestError(
                "total_sentences must be >= the largest occurrence count "
                f"({self.total_sentences} < {max(counts)})"
            )
        seen = set()
        for lemma, _ in self.words:
            if lemma in seen:
                raise ManifestError(f"duplicate word in manifest: {lemma!r}")
            seen.add(lemma)
        object.__setattr__(self, "words", tuple((str(w), int(c)) for w, c in self.words))

    def occurrence_count(self, lemma_key: str) -> int | None:
        for lemma, count in self.words:
            if lemma == lemma_key:
                return count
        return None

    def to_json(self) -> dict:
        return {
            "corpus_id": self.corpus_id,
            "epoch_label": self.epoch_label,
            "total_sentences": self.total_sentences,
            "embedding_dim": self.embedding_dim,
            "words": [[w, c] for w, c in self.words],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CorpusManifest":
        try:
            return cls(
                corpus_id=str(doc["corpus_id"]),
                epoch_label=str(doc["epoch_label"]),
                total_sentences=int(doc["total_sentences"]),
                embedding_dim=int(doc["embedding_dim"]),
                words=tuple((str(w), int(c)) for w, c in doc["words"]),
            )
        except KeyError as exc:
            raise ManifestError(f"manifest missing field {exc}") from exc


@dataclass(frozen=True)
class SiblingSet:
    """All contextualised embeddings of one word in one corpus.

    ``vectors`` is an (N, d) float32 matrix, one row per occurrence,
    frozen after construction. N = 0 is a valid, empty set; scoring treats
    such words as unscorable instead of failing the whole run.
    """

    lemma_key: str
    corpus_id: str
    vectors: np.ndarray
    sentence_ids: tuple[str, ...]

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be 2-D, got shape {vectors.shape}")
        bad = ~np.isfinite(vectors)
        if bad.any():
            row = int(np.nonzero(bad.any(axis=1))[0][0])
            raise ValueError(f"non-finite value in row {row} of {self.lemma_key!r}")
        if len(self.sentence_ids) != vectors.shape[0]:
            raise ValueError(
                f"{len(self.sentence_ids)} sentence ids for {vectors.shape[0]} vectors"
            )
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "sentence_ids", tuple(self.sentence_ids))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.n == 0


@dataclass(frozen=True)
class GoldRanking:
    """Human graded change scores keyed by lemma, for rank evaluation."""

    entries: tuple[tuple[str, float], ...]
    binary_labels: dict[str, bool] | None = field(default=None)

    def __post_init__(self):
        if len(self.entries) < 2:
            raise GoldFormatError("gold ranking needs at least 2 entries")
        seen = set()
        for lemma, _ in self.entries:
            if lemma in seen:
                raise GoldFormatError(f"duplicate gold word: {lemma!r}")
            seen.add(lemma)
        object.__setattr__(
            self, "entries", tuple((str(w), float(s)) for w, s in self.entries)
        )

    def lemmas(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.entries)

    def score(self, lemma_key: str) -> float:
        for lemma, score in self.entries:
            if lemma == lemma_key:
                return score
        raise KeyError(lemma_key)


# ---------------------------------------------------------------------------
# sibling file IO


def sibling_filename(lemma_key: str) -> str:
    """Filesystem-safe file name for a lemma (percent-encoded)."""
    return urllib.parse.quote(lemma_key, safe="") + ".sscd"


def sibling_path(corpus_dir: str | Path, lemma_key: str) -> Path:
    return Path(corpus_dir) / sibling_filename(lemma_key)


def write_sibling_set(path: str | Path, siblings: SiblingSet) -> None:
    path = Path(path)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", FORMAT_VERSION, siblings.n, siblings.dim))
        f.write(siblings.vectors.astype("<f4", copy=False).tobytes(order="C"))
        for sid in siblings.sentence_ids:
            raw = sid.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)


def _read_exact(f: BinaryIO, count: int, what: str, path) -> bytes:
    offset = f.tell()
    data = f.read(count)
    if len(data) != count:
        raise SiblingFormatError(
            f"truncated file while reading {what}: wanted {count} bytes, got {len(data)}",
            path=path,
            offset=offset,
        )
    return data


def load_sibling_set(
    path: str | Path,
    lemma_key: str | None = None,
    corpus_id: str = "",
    expected_dim: int | None = None,
) -> SiblingSet:
    """Read one sibling file, preserving row order.

    ``lemma_key`` defaults to the name encoded in the file name.
    ``expected_dim`` cross-checks the header against manifest metadata.
    """
    path = Path(path)
    if lemma_key is None:
        stem = path.name
        if stem.endswith(".sscd"):
            stem = stem[: -len(".sscd")]
        lemma_key = urllib.parse.unquote(stem)
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic", path)
        if magic != MAGIC:
            raise SiblingFormatError(
                f"bad magic {magic!r}, expected {MAGIC!r}", path=path, offset=0
            )
        version, n, dim = struct.unpack("<III", _read_exact(f, 12, "header", path))
        if version != FORMAT_VERSION:
            raise SiblingFormatError(
                f"unsupported format version {version}", path=path, offset=4
            )
        if dim == 0:
            raise SiblingFormatError("embedding dim 0 in header", path=path, offset=12)
        if expected_dim is not None and dim != expected_dim:
            raise SiblingFormatError(
                f"dimension mismatch: file says d={dim}, manifest says d={expected_dim}",
                path=path,
                offset=12,
            )
        matrix_offset = f.tell()
        raw = f.read(4 * n * dim)
        if len(raw) != 4 * n * dim:
            # figure out which row broke off, for a usable error message
            row = len(raw) // (4 * dim)
            raise SiblingFormatError(
                f"vector data ends inside row {row}: row has "
                f"{(len(raw) - row * 4 * dim) // 4} of {dim} values",
                path=path,
                offset=matrix_offset + len(raw),
            )
        vectors = np.frombuffer(raw, dtype="<f4").reshape(n, dim)
        bad = ~np.isfinite(vectors)
        if bad.any():
            row = int(np.nonzero(bad.any(axis=1))[0][0])
            raise SiblingFormatError(
                f"non-finite value in row {row}", path=path, offset=matrix_offset
            )
        ids = []
        for i in range(n):
            (length,) = struct.unpack("<I", _read_exact(f, 4, f"id length {i}", path))
            raw_id = _read_exact(f, length, f"id {i}", path)
            try:
                ids.append(raw_id.decode("utf-8"))
            except UnicodeDecodeError as exc:
                raise SiblingFormatError(
                    f"sentence id {i} is not valid UTF-8", path=path, offset=f.tell()
                ) from exc
    return SiblingSet(
        lemma_key=lemma_key, corpus_id=corpus_id, vectors=vectors, sentence_ids=tuple(ids)
    )


def read_sibling_header(path: str | Path) -> tuple[int, int, int]:
    """Return (version, N, d) without loading the vectors."""
    path = Path(path)
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic", path)
        if magic != MAGIC:
            raise SiblingFormatError(
                f"bad magic {magic!r}, expected {MAGIC!r}", path=path, offset=0
            )
        return struct.unpack("<III", _read_exact(f, 12, "header", path))


# ---------------------------------------------------------------------------
# manifest IO


def write_manifest(path: str | Path, manifest: CorpusManifest) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_manifest(path: str | Path) -> CorpusManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    return CorpusManifest.from_json(doc)


def check_manifest_consistency(manifest: CorpusManifest, corpus_dir: str | Path) -> None:
    """Verify every manifest count against the row count of its sibling file."""
    corpus_dir = Path(corpus_dir)
    for lemma, count in manifest.words:
        path = sibling_path(corpus_dir, lemma)
        if not path.exists():
            if count == 0:
                continue
            raise ManifestError(
                f"manifest lists {lemma!r} with {count} occurrences but {path} is missing"
            )
        _, n, dim = read_sibling_header(path)
        if n != count:
            raise ManifestError(
                f"{lemma!r}: manifest says {count} occurrences, file has {n}"
            )
        if dim != manifest.embedding_dim:
            raise ManifestError(
                f"{lemma!r}: file dim {dim} != manifest dim {manifest.embedding_dim}"
            )


# ---------------------------------------------------------------------------
# gold file IO


def load_gold(path: str | Path, format: str = "semeval_graded") -> GoldRanking:
    """Parse a gold file of ``word<TAB>score`` lines.

    Both supported formats share this layout (the Liverpool list after the
    documented preprocessing is tab-separated as well). A third column, when
    present, is read as a 0/1 binary change label.
    """
    if format not in GOLD_FORMATS:
        raise GoldFormatError(f"unknown gold format {format!r}; expected {GOLD_FORMATS}")
    path = Path(path)
    entries: list[tuple[str, float]] = []
    labels: dict[str, bool] = {}
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise GoldFormatError(
                    f"{path}:{lineno}: expected word<TAB>score, got {line!r}"
                )
            word = parts[0].strip()
            if word in seen:
                raise GoldFormatError(f"{path}:{lineno}: duplicate word {word!r}")
            seen.add(word)
            try:
                score = float(parts[1])
            except ValueError as exc:
                raise GoldFormatError(
                    f"{path}:{lineno}: unparsable score {parts[1]!r} for {word!r}"
                ) from exc
            entries.append((word, score))
            if len(parts) >= 3 and parts[2].strip():
                flag = parts[2].strip()
                if flag not in ("0", "1"):
                    raise GoldFormatError(
                        f"{path}:{lineno}: binary label must be 0 or 1, got {flag!r}"
                    )
                labels[word] = flag == "1"
    return GoldRanking(entries=tuple(entries), binary_labels=labels or None)

"""Command line for sibling-embedding extraction.

``extract`` turns a corpus plus a target list into per-word sibling files,
``manifest.json``, and ``skips.json``; ``preprocess-liverpool`` converts a
raw forum export into the one-sentence-per-line tokenized layout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus_io import CORPUS_FORMATS, preprocess_liverpool, write_tokenized
from .extract import COMBINE_MODES, ExtractionConfig, extract


def _load_targets(path: str) -> tuple[str, ...]:
    lemmas = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lemmas.append(line)
    if not lemmas:
        raise ValueError(f"{path}: no target words found")
    return tuple(lemmas)


def cmd_extract(args) -> int:
    config = ExtractionConfig(
        corpus_path=args.corpus,
        targets=_load_targets(args.targets),
        out_dir=args.out,
        model=args.model,
        corpus_format=args.format,
        combine=args.combine,
        max_length=args.max_length,
        batch_size=args.batch_size,
        corpus_id=args.corpus_id or "",
        epoch_label=args.epoch or "",
        device=args.device,
    )
    result = extract(config)
    emitted = sum(result.counts.values())
    print(
        f"extracted {emitted} vectors for {len(result.counts)} targets "
        f"over {result.total_sentences} sentences -> {result.out_dir}"
    )
    if result.skipped:
        print(f"skipped {sum(result.skipped.values())} occurrence(s), see skips.json",
              file=sys.stderr)
    return 0


def cmd_preprocess(args) -> int:
    sentences, skipped = preprocess_liverpool(args.input)
    write_tokenized(args.out, sentences)
    print(f"wrote {len(sentences)} sentences -> {args.out}")
    if skipped:
        print(f"skipped {skipped} record(s) without body text", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sscd-extract", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_extract = sub.add_parser("extract", help="extract sibling embeddings")
    p_extract.add_argument("--model", default="bert-base-multilingual-cased",
                           help="model name or local path")
    p_extract.add_argument("--corpus", required=True, help="corpus file")
    p_extract.add_argument("--format", default="semeval_tokenized", choices=CORPUS_FORMATS)
    p_extract.add_argument("--targets", required=True, help="file with one lemma per line")
    p_extract.add_argument("--out", required=True, help="output corpus directory")
    p_extract.add_argument("--combine", default="mean", choices=COMBINE_MODES,
                           help="how to combine the last four layers")
    p_extract.add_argument("--max-length", dest="max_length", type=int, default=512)
    p_extract.add_argument("--batch-size", dest="batch_size", type=int, default=32)
    p_extract.add_argument("--corpus-id", dest="corpus_id", help="manifest corpus id")
    p_extract.add_argument("--epoch", help="manifest epoch label")
    p_extract.add_argument("--device", default="cpu")
    p_extract.set_defaults(func=cmd_extract)

    p_prep = sub.add_parser("preprocess-liverpool",
                            help="forum export -> tokenized sentence lines")
    p_prep.add_argument("--input", required=True)
    p_prep.add_argument("--out", required=True)
    p_prep.set_defaults(func=cmd_preprocess)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"sscd-extract {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: score, rate-search, eval, synth, inspect.

Every artifact-producing subcommand writes a JSON run record holding the
full effective configuration, the seed, and the tool version, so any run
can be reproduced bit-for-bit with ``--config <run_record.json>``.

Exit codes: 0 success, 1 usage error, 2 data/configuration error,
3 unscorable words under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import (
    CorpusManifest,
    SiblingSet,
    load_gold,
    load_manifest,
    load_sibling_set,
    read_sibling_header,
    sibling_path,
)
from .errors import ConfigError, ManifestError, SSCDError
from .evaluation import (
    EVAL_MODES,
    evaluate_run,
    write_rate_curve,
    write_summary_table,
)
from .metrics import (
    DEFAULT_DSCD_SAMPLES,
    FAMILY_ALIASES,
    METRIC_NAMES,
    MetricSpec,
)
from .scoring import (
    attach_bootstrap_ci,
    estimate_swap_rate,
    merge_per_rep,
    read_per_rep_csv,
    read_scores_csv,
    score_all,
    write_per_rep_csv,
    write_scores_csv,
)
from .swap import STRATEGIES, SwapConfig
from .synth import (
    SynthSpec,
    WordProfile,
    generate,
    graded_benchmark,
    rate_minimum_benchmark,
    shifted_benchmark,
    stable_benchmark,
    write_benchmark,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_STRICT = 3

DEFAULT_RATE_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; our contract reserves 2 for data
    # errors, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class _UsageError(SSCDError):
    """Malformed command line that argparse alone cannot detect."""


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of a score / rate-search run."""

    corpus1: str
    corpus2: str
    out: str
    targets: str | None = None
    gold: str | None = None
    gold_format: str = "semeval_graded"
    family: str = "div"
    metrics: tuple[str, ...] = ("kl12",)
    rates: tuple[float, ...] = (0.4,)
    strategy: str = "random"
    selection_metric: str = "cosine"
    dscd_samples: int = DEFAULT_DSCD_SAMPLES
    repetitions: int = 20
    seed: int = 0
    bootstrap: int = 0
    ci_level: float = 0.95
    aggregation: str = "pooled"
    jobs: int = 1
    strict: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        for rate in self.rates:
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"swap rate must be 0 or in (0, 1], got {rate}")
        if self.aggregation not in EVAL_MODES:
            raise ConfigError(f"aggregation must be one of {EVAL_MODES}")
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))

    def metric_specs(self) -> list[MetricSpec]:
        return [
            MetricSpec(family=self.family, name=name, dscd_samples=self.dscd_samples)
            for name in self.metrics
        ]

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["metrics"] = list(self.metrics)
        doc["rates"] = list(self.rates)
        return doc


def _load_config_file(path: str) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "config" in doc and doc.get("tool") == "sscd":
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return doc


def _merge_config(
    args: argparse.Namespace, default_rates: tuple[float, ...] | None = None
) -> RunConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    overrides = {
        "corpus1": args.corpus1,
        "corpus2": args.corpus2,
        "out": args.out,
        "targets": args.targets,
        "gold": getattr(args, "gold", None),
        "gold_format": getattr(args, "gold_format", None),
        "family": args.family,
        "metrics": _split_metrics(args.metric),
        "rates": _resolve_rates(args),
        "strategy": args.strategy,
        "selection_metric": args.selection_metric,
        "dscd_samples": args.dscd_samples,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "bootstrap": getattr(args, "bootstrap", None),
        "ci_level": getattr(args, "ci_level", None),
        "aggregation": getattr(args, "aggregation", None),
        "jobs": args.jobs,
        "strict": args.strict,
    }
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if default_rates is not None and "rates" not in merged:
        merged["rates"] = default_rates
    missing = [k for k in ("corpus1", "corpus2", "out") if not merged.get(k)]
    if missing:
        raise _UsageError(
            f"missing required option(s): {', '.join('--' + m for m in missing)}"
        )
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(f"bad config field: {exc}") from exc


def _split_metrics(value: str | None) -> tuple[str, ...] | None:
    if value is None:
        return None
    names = tuple(n.strip() for n in value.split(",") if n.strip())
    for name in names:
        if name not in METRIC_NAMES and name not in ("kl_12", "kl_21"):
            raise ConfigError(f"unknown metric {name!r}; expected one of {METRIC_NAMES}")
    return names


def _resolve_rates(args: argparse.Namespace) -> tuple[float, ...] | None:
    grid = getattr(args, "rate_grid", None)
    rate = getattr(args, "swap_rate", None)
    if grid is not None and rate is not None:
        raise _UsageError("--swap-rate and --rate-grid are mutually exclusive")
    if grid is not None:
        return tuple(float(r) for r in grid.split(","))
    if rate is not None:
        return (float(rate),)
    return None


# ---------------------------------------------------------------------------
# corpus loading shared by score and rate-search


def _load_targets(path: str) -> list[str]:
    lemmas = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lemmas.append(line)
    if not lemmas:
        raise ConfigError(f"{path}: no target words found")
    return lemmas


def _empty_set(lemma: str, corpus_id: str, dim: int) -> SiblingSet:
    return SiblingSet(
        lemma_key=lemma,
        corpus_id=corpus_id,
        vectors=np.zeros((0, dim), dtype=np.float32),
        sentence_ids=(),
    )


def _load_side(manifest: CorpusManifest, corpus_dir: Path, lemma: str) -> SiblingSet:
    count = manifest.occurrence_count(lemma)
    path = sibling_path(corpus_dir, lemma)
    if count is None or count == 0:
        if path.exists():
            return load_sibling_set(
                path, lemma, manifest.corpus_id, expected_dim=manifest.embedding_dim
            )
        return _empty_set(lemma, manifest.corpus_id, manifest.embedding_dim)
    if not path.exists():
        raise ManifestError(
            f"manifest lists {lemma!r} with {count} occurrences but {path} is missing"
        )
    siblings = load_sibling_set(
        path, lemma, manifest.corpus_id, expected_dim=manifest.embedding_dim
    )
    if siblings.n != count:
        raise ManifestError(
            f"{lemma!r}: manifest says {count} occurrences, file has {siblings.n}"
        )
    return siblings


def _load_pairs(config: RunConfig):
    dir1, dir2 = Path(config.corpus1), Path(config.corpus2)
    m1 = load_manifest(dir1 / "manifest.json")
    m2 = load_manifest(dir2 / "manifest.json")
    if m1.embedding_dim != m2.embedding_dim:
        raise ManifestError(
            f"embedding dims differ: {m1.embedding_dim} vs {m2.embedding_dim}"
        )
    if config.targets:
        targets = _load_targets(config.targets)
    else:
        in_both = {w for w, _ in m2.words}
        targets = [w for w, _ in m1.words if w in in_both]
    pairs = [
        (_load_side(m1, dir1, lemma), _load_side(m2, dir2, lemma)) for lemma in targets
    ]
    return m1, m2, targets, pairs


def _swap_config(config: RunConfig, rate: float, m1: CorpusManifest, m2: CorpusManifest):
    totals = None
    if config.strategy.endswith("_normalized"):
        totals = (m1.total_sentences, m2.total_sentences)
    return SwapConfig(
        rate=rate,
        strategy=config.strategy,
        selection_metric=config.selection_metric,
        total_sentences=totals,
    )


def _cell_name(spec: MetricSpec, rate: float) -> str:
    short = {v: k for k, v in FAMILY_ALIASES.items()}[spec.family]
    return f"{short}_{spec.name}_rate{rate:g}"


def _write_record(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands


def cmd_score(args) -> int:
    config = _merge_config(args)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    m1, m2, targets, pairs = _load_pairs(config)
    cells = []
    unscorable: dict[str, str] = {}
    for spec in config.metric_specs():
        for rate in config.rates:
            swap_cfg = _swap_config(config, rate, m1, m2)
            batch = score_all(
                pairs, spec, swap_cfg, config.repetitions, config.seed, n_jobs=config.jobs
            )
            scores = batch.scores
            if config.bootstrap:
                scores = tuple(
                    attach_bootstrap_ci(s, config.ci_level, config.bootstrap, config.seed)
                    for s in scores
                )
            name = _cell_name(spec, rate)
            scores_csv = f"scores_{name}.csv"
            per_rep_csv = f"per_rep_{name}.csv"
            write_scores_csv(out_dir / scores_csv, scores)
            write_per_rep_csv(out_dir / per_rep_csv, scores)
            cells.append(
                {
                    "family": spec.family,
                    "metric": spec.name,
                    "rate": rate,
                    "scores_csv": scores_csv,
                    "per_rep_csv": per_rep_csv,
                    "n_scored": len(scores),
                }
            )
            unscorable.update(dict(batch.unscorable))
    _write_record(
        out_dir / "run_record.json",
        {
            "tool": "sscd",
            "version": __version__,
            "command": "score",
            "config": config.to_json(),
            "cells": cells,
            "unscorable": sorted(unscorable),
        },
    )
    print(f"scored {len(targets) - len(unscorable)}/{len(targets)} words -> {out_dir}")
    if unscorable:
        print(
            f"warning: {len(unscorable)} unscorable word(s): {', '.join(sorted(unscorable))}",
            file=sys.stderr,
        )
        if config.strict:
            return EXIT_STRICT
    return EXIT_OK


def cmd_rate_search(args) -> int:
    config = _merge_config(args, default_rates=DEFAULT_RATE_GRID)
    if len(config.metrics) != 1:
        raise ConfigError("rate-search uses exactly one metric")
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    m1, m2, _, pairs = _load_pairs(config)
    spec = config.metric_specs()[0]
    swap_cfg = _swap_config(config, config.rates[0], m1, m2)
    result = estimate_swap_rate(
        pairs, spec, swap_cfg, config.rates, config.repetitions, config.seed
    )
    write_rate_curve(out_dir / "rate_curve.csv", result)
    _write_record(
        out_dir / "rate_search.json",
        {
            "tool": "sscd",
            "version": __version__,
            "command": "rate-search",
            "config": config.to_json(),
            "estimated_rate": result.estimated_rate,
            "grid": list(result.grid),
            "mean_e_swap": list(result.mean_e_swap),
            "std_e_swap": list(result.std_e_swap),
            "excluded": list(result.excluded),
        },
    )
    print(f"estimated swap rate: {result.estimated_rate:g} -> {out_dir}")
    if result.excluded:
        print(
            f"warning: {len(result.excluded)} unscorable word(s) excluded",
            file=sys.stderr,
        )
        if config.strict:
            return EXIT_STRICT
    return EXIT_OK


def _eval_cells(args) -> list[dict]:
    """Resolve the (metadata, scores, per-rep) triples the eval covers."""
    cells = []
    if args.run_record:
        record_path = Path(args.run_record)
        record = json.loads(record_path.read_text(encoding="utf-8"))
        base = record_path.parent
        for cell in record.get("cells", []):
            cells.append(
                {
                    "family": cell["family"],
                    "metric": cell["metric"],
                    "rate": float(cell["rate"]),
                    "scores": base / cell["scores_csv"],
                    "per_rep": base / cell["per_rep_csv"] if cell.get("per_rep_csv") else None,
                }
            )
    else:
        for scores_file in args.scores:
            path = Path(scores_file)
            per_rep = path.with_name(path.name.replace("scores_", "per_rep_", 1))
            cells.append(
                {
                    "family": None,
                    "metric": path.stem,
                    "rate": None,
                    "scores": path,
                    "per_rep": per_rep if per_rep != path and per_rep.exists() else None,
                }
            )
    if not cells:
        raise ConfigError("nothing to evaluate: no score cells found")
    return cells


def cmd_eval(args) -> int:
    if not args.run_record and not args.scores:
        raise ConfigError("eval needs --run-record or --scores")
    gold = load_gold(args.gold, args.gold_format)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    table_cells = {}
    any_excluded = False
    for cell in _eval_cells(args):
        scores = read_scores_csv(cell["scores"])
        if args.mode == "per_seed_mean":
            if cell["per_rep"] is None or not Path(cell["per_rep"]).exists():
                raise ConfigError(
                    f"{cell['scores']}: per_seed_mean needs the matching per-rep CSV"
                )
            scores = merge_per_rep(scores, read_per_rep_csv(cell["per_rep"]))
        report = evaluate_run(scores, gold, mode=args.mode)
        any_excluded = any_excluded or bool(report.excluded)
        reports.append(
            {
                "family": cell["family"],
                "metric": cell["metric"],
                "rate": cell["rate"],
                "spearman": report.spearman,
                "n_words": report.n_words,
                "per_seed_spearman": list(report.per_seed_spearman or []) or None,
                "excluded": list(report.excluded),
            }
        )
        if cell["family"] is not None and cell["rate"] is not None:
            table_cells[(cell["family"], cell["metric"], cell["rate"])] = report.spearman
    _write_record(
        out_dir / "eval_report.json",
        {
            "tool": "sscd",
            "version": __version__,
            "command": "eval",
            "gold": str(args.gold),
            "gold_format": args.gold_format,
            "mode": args.mode,
            "cells": reports,
        },
    )
    if table_cells:
        write_summary_table(out_dir / "summary_table.csv", table_cells)
    for rep in reports:
        label = rep["metric"] if rep["rate"] is None else f"{rep['metric']} @ rate {rep['rate']:g}"
        print(f"{label}: spearman {rep['spearman']:.4f} over {rep['n_words']} words")
    if any_excluded:
        print("warning: some gold words were not scored", file=sys.stderr)
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def _spec_from_file(path: str) -> SynthSpec:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    profiles = tuple(
        WordProfile(
            kind=p["kind"],
            amount=float(p.get("amount", 0.0)),
            offset=float(p.get("offset", 4.0)),
            n1=p.get("n1"),
            n2=p.get("n2"),
            gold=p.get("gold"),
        )
        for p in doc["profiles"]
    )
    return SynthSpec(
        profiles=profiles,
        dim=int(doc.get("dim", 16)),
        n_range=tuple(doc.get("n_range", (50, 500))),
        seed=int(doc.get("seed", 0)),
        total_sentences=tuple(doc["total_sentences"]) if doc.get("total_sentences") else None,
    )


def cmd_synth(args) -> int:
    if args.spec:
        spec = _spec_from_file(args.spec)
    else:
        n_range = (args.n_min, args.n_max)
        if args.preset == "stable":
            spec = stable_benchmark(args.n_words, args.dim, n_range, args.seed)
        elif args.preset == "shifted":
            spec = shifted_benchmark(args.n_words, args.delta, args.dim, n_range, args.seed)
        elif args.preset == "graded":
            spec = graded_benchmark(
                n_stable=args.n_words // 2, dim=args.dim, n_range=n_range, seed=args.seed
            )
        else:  # rate-min
            spec = rate_minimum_benchmark(dim=args.dim, seed=args.seed)
    bench = generate(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = write_benchmark(bench, out_dir)
    _write_record(
        out_dir / "synth_record.json",
        {
            "tool": "sscd",
            "version": __version__,
            "command": "synth",
            "preset": None if args.spec else args.preset,
            "spec_file": args.spec,
            "seed": spec.seed,
            "dim": spec.dim,
            "n_words": spec.n_words,
            "paths": {k: str(v) for k, v in paths.items()},
        },
    )
    print(f"wrote {spec.n_words}-word benchmark -> {out_dir}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    if path.suffix == ".json":
        manifest = load_manifest(path)
        print(f"manifest {manifest.corpus_id} ({manifest.epoch_label})")
        print(f"  sentences: {manifest.total_sentences}")
        print(f"  embedding dim: {manifest.embedding_dim}")
        print(f"  words: {len(manifest.words)}")
        for lemma, count in manifest.words[: args.rows]:
            print(f"    {lemma}: {count}")
        if len(manifest.words) > args.rows:
            print(f"    ... {len(manifest.words) - args.rows} more")
        return EXIT_OK
    version, n, dim = read_sibling_header(path)
    siblings = load_sibling_set(path)
    print(f"sibling file {path.name}")
    print(f"  word: {siblings.lemma_key}")
    print(f"  format version: {version}")
    print(f"  occurrences: {n}")
    print(f"  embedding dim: {dim}")
    if siblings.is_empty:
        print("  empty set (word never occurs in this corpus)")
        return EXIT_OK
    norms = np.linalg.norm(siblings.vectors[: args.rows].astype(np.float64), axis=1)
    for i, (norm, sid) in enumerate(zip(norms, siblings.sentence_ids)):
        print(f"  row {i}: |v| = {norm:.4f}  id = {sid}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common_scoring_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config or run record; flags override it")
    p.add_argument("--corpus1", help="directory of the earlier corpus")
    p.add_argument("--corpus2", help="directory of the later corpus")
    p.add_argument("--targets", help="file with one target lemma per line")
    p.add_argument("--out", help="output directory")
    p.add_argument("--family", choices=sorted(FAMILY_ALIASES), help="metric family")
    p.add_argument("--metric", help="metric name(s), comma separated")
    p.add_argument("--strategy", choices=STRATEGIES, help="swap selection strategy")
    p.add_argument("--selection-metric", dest="selection_metric",
                   help="distance used by centroid strategies")
    p.add_argument("--dscd-samples", dest="dscd_samples", type=int,
                   help="samples per side for dscd metrics")
    p.add_argument("--repetitions", type=int, help="swap repetitions per word")
    p.add_argument("--seed", type=int, help="base seed for all streams")
    p.add_argument("--jobs", type=int, help="worker threads across words")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                   help="exit 3 when any word is unscorable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sscd", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sscd {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_score = sub.add_parser("score", help="score semantic change per target word")
    _add_common_scoring_flags(p_score)
    p_score.add_argument("--swap-rate", dest="swap_rate", type=float,
                         help="swap rate in [0, 1]; 0 disables swapping (ablation)")
    p_score.add_argument("--rate-grid", dest="rate_grid",
                         help="comma-separated swap rates to score")
    p_score.add_argument("--gold", help="gold file recorded for later eval")
    p_score.add_argument("--gold-format", dest="gold_format",
                         choices=("semeval_graded", "liverpool"))
    p_score.add_argument("--bootstrap", type=int,
                         help="bootstrap resamples for score CIs (0 = off)")
    p_score.add_argument("--ci-level", dest="ci_level", type=float,
                         help="bootstrap confidence level")
    p_score.add_argument("--aggregation", choices=EVAL_MODES,
                         help="evaluation mode recorded for this run")
    p_score.set_defaults(func=cmd_score)

    p_rate = sub.add_parser("rate-search", help="estimate the swap rate without labels")
    _add_common_scoring_flags(p_rate)
    p_rate.add_argument("--rate-grid", dest="rate_grid",
                        help="comma-separated candidate rates (default 0.1..0.9)")
    p_rate.set_defaults(func=cmd_rate_search, swap_rate=None)

    p_eval = sub.add_parser("eval", help="rank-correlate scores against gold")
    p_eval.add_argument("--run-record", dest="run_record",
                        help="run_record.json of a score run")
    p_eval.add_argument("--scores", nargs="*", help="scores CSV file(s)")
    p_eval.add_argument("--gold", required=True, help="gold file")
    p_eval.add_argument("--gold-format", dest="gold_format", default="semeval_graded",
                        choices=("semeval_graded", "liverpool"))
    p_eval.add_argument("--mode", default="pooled", choices=EVAL_MODES)
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument("--strict", action="store_true",
                        help="exit 3 when gold words are missing from the scores")
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a synthetic benchmark")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--preset", default="graded",
                         choices=("stable", "shifted", "graded", "rate-min"))
    p_synth.add_argument("--spec", help="JSON file with explicit word profiles")
    p_synth.add_argument("--n-words", dest="n_words", type=int, default=40)
    p_synth.add_argument("--delta", type=float, default=2.0)
    p_synth.add_argument("--dim", type=int, default=16)
    p_synth.add_argument("--n-min", dest="n_min", type=int, default=50)
    p_synth.add_argument("--n-max", dest="n_max", type=int, default=500)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)

    p_inspect = sub.add_parser("inspect", help="dump manifest or sibling file headers")
    p_inspect.add_argument("path")
    p_inspect.add_argument("--rows", type=int, default=5,
                           help="how many rows/words to show")
    p_inspect.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"sscd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SSCDError, OSError, json.JSONDecodeError) as exc:
        print(f"sscd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

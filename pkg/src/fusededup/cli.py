"""Command-line entry point: ``fusededup {generate,dedupe,baseline,evaluate,compare}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baseline import BaselineConfig, baseline_scored
from .config import DECISIONS, RunConfig, load_config
from .datagen import format_summary, generate, summarize, summary_json
from .errors import ConfigError, DedupeError, ProviderError
from .evaluation import EvalReport, evaluate
from .fusion import ClusterParams
from .pipeline import run_pipeline
from .records import (
    load_dataset,
    load_ground_truth,
    load_pair_set,
    write_dataset,
    write_ground_truth,
    write_pairs,
)

log = logging.getLogger("fusededup")

DEFAULT_DATASET_NAME = "Simulated_CRM_Dataset"


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is outside [0, 1]")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be >= 1")
    return value


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="TOML config file")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed for data generation")
    p.add_argument("--out-dir", "-o", type=Path, default=argparse.SUPPRESS, help="directory for output files")
    p.add_argument("--workers", type=_positive_int, default=argparse.SUPPRESS,
                   help="threads for pair scoring (default: available cores)")
    p.add_argument("--decision", choices=DECISIONS, default=argparse.SUPPRESS,
                   help="duplicate decision path (default: threshold)")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="fusededup",
        description="Multimodal late-fusion record deduplication without PII.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic dataset and its ground truth")
    g.add_argument("--entities", type=_positive_int, default=None)
    g.add_argument("--dup-fraction", type=_probability, default=None)
    g.add_argument("--name", default=DEFAULT_DATASET_NAME, help="base file name (default: %(default)s)")

    d = sub.add_parser("dedupe", parents=[common], help="run the multimodal pipeline")
    d.add_argument("dataset", type=Path)
    d.add_argument("--threshold", type=_probability, default=None, help="fused-score threshold")
    d.add_argument("--eps", type=float, default=None, help="DBSCAN radius")
    d.add_argument("--min-samples", type=_positive_int, default=None)
    d.add_argument("--raw-concat", action="store_true", default=None,
                   help="cluster on unnormalized concatenated blocks")

    b = sub.add_parser("baseline", parents=[common], help="run the string-matching baseline")
    b.add_argument("dataset", type=Path)
    b.add_argument("--threshold", type=_probability, default=None)

    e = sub.add_parser("evaluate", parents=[common], help="score a pairs CSV against ground truth")
    e.add_argument("pairs", type=Path)
    e.add_argument("--truth", type=Path, required=True)

    c = sub.add_parser("compare", parents=[common], help="baseline vs multimodal in one table")
    c.add_argument("dataset", type=Path)
    c.add_argument("--truth", type=Path, default=None,
                   help="ground-truth CSV (default: <dataset>_truth.csv)")
    c.add_argument("--json", action="store_true", help="also print the metrics as JSON")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults < TOML file < command-line flags."""
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "workers", None) is not None:
        cfg = replace(cfg, workers=args.workers)
    if getattr(args, "decision", None) is not None:
        cfg = replace(cfg, fusion=replace(cfg.fusion, decision=args.decision))
    if args.command == "generate":
        gen = cfg.generate
        if getattr(args, "seed", None) is not None:
            gen = replace(gen, seed=args.seed)
        if args.entities is not None:
            gen = replace(gen, n_entities=args.entities)
        if args.dup_fraction is not None:
            gen = replace(gen, duplicate_fraction=args.dup_fraction)
        cfg = replace(cfg, generate=gen)
    if args.command == "dedupe":
        fusion = cfg.fusion
        if args.threshold is not None:
            fusion = replace(fusion, weights=replace(fusion.weights, threshold=args.threshold))
        if args.raw_concat:
            fusion = replace(fusion, raw_concat=True)
        eps = cfg.dbscan.eps if args.eps is None else args.eps
        min_samples = cfg.dbscan.min_samples if args.min_samples is None else args.min_samples
        cfg = replace(cfg, fusion=fusion, dbscan=ClusterParams(eps, min_samples))
    if args.command == "baseline" and args.threshold is not None:
        cfg = replace(cfg, baseline=BaselineConfig(args.threshold))
    return cfg


def _out_dir(args: argparse.Namespace, fallback: Path) -> Path:
    out = getattr(args, "out_dir", None) or fallback
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = _out_dir(args, Path("."))
    ds, truth = generate(cfg.generate)
    data_path = out / f"{args.name}.csv"
    truth_path = out / f"{args.name}_truth.csv"
    write_dataset(data_path, ds.records)
    write_ground_truth(truth_path, truth)
    summary = summarize(ds, truth)
    print(format_summary(summary))
    print(summary_json(summary))
    log.info("wrote %s and %s", data_path, truth_path)
    return 0


def cmd_dedupe(args: argparse.Namespace, cfg: RunConfig) -> int:
    ds = load_dataset(args.dataset)
    out = _out_dir(args, args.dataset.parent)
    start = time.perf_counter()
    result = run_pipeline(ds, cfg, cluster=True)
    elapsed = time.perf_counter() - start
    stem = args.dataset.stem
    pairs_path = out / f"{stem}_duplicates.csv"
    n_pairs = write_pairs(pairs_path, result.predicted_pairs)
    clusters_path = out / f"{stem}_clusters.csv"
    with clusters_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["record_id", "label"])
        for rid, label in enumerate(result.labels):
            writer.writerow([rid, int(label)])
    print(f"flagged {n_pairs} duplicate pairs ({cfg.fusion.decision}) among {len(ds)} records")
    stages = " ".join(f"{k}={v:.3f}s" for k, v in result.timings.items())
    print(f"timing: total={elapsed:.3f}s {stages}", file=sys.stderr)
    return 0


def cmd_baseline(args: argparse.Namespace, cfg: RunConfig) -> int:
    ds = load_dataset(args.dataset)
    out = _out_dir(args, args.dataset.parent)
    start = time.perf_counter()
    scored = baseline_scored(ds.records, cfg.baseline)
    elapsed = time.perf_counter() - start
    path = out / f"{args.dataset.stem}_baseline.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["record_i", "record_j", "similarity"])
        for p in scored:
            writer.writerow([p.i, p.j, f"{p.similarity:.6f}"])
    print(f"flagged {len(scored)} duplicate pairs (baseline, threshold {cfg.baseline.threshold}) among {len(ds)} records")
    print(f"timing: total={elapsed:.3f}s", file=sys.stderr)
    return 0


def cmd_evaluate(args: argparse.Namespace, cfg: RunConfig) -> int:
    predicted = load_pair_set(args.pairs)
    truth = load_ground_truth(args.truth)
    report = evaluate(predicted, truth)
    print(report.to_table(args.pairs.stem))
    print(report.to_json())
    return 0


def format_comparison(base: EvalReport, multi: EvalReport) -> str:
    rows = [
        f"{'Metric':<10} {'Baseline (String Match)':>24} {'Multimodal':>12}",
        f"{'Precision':<10} {base.precision:>24.4f} {multi.precision:>12.4f}",
        f"{'Recall':<10} {base.recall:>24.4f} {multi.recall:>12.4f}",
        f"{'F1 Score':<10} {base.f1:>24.4f} {multi.f1:>12.4f}",
    ]
    return "\n".join(rows)


def directional_checks(base: EvalReport, multi: EvalReport, recall_margin: float = 0.15) -> dict[str, bool]:
    return {
        f"multimodal recall >= baseline recall + {recall_margin}": multi.recall >= base.recall + recall_margin,
        "baseline precision >= multimodal precision": base.precision >= multi.precision,
    }


def cmd_compare(args: argparse.Namespace, cfg: RunConfig) -> int:
    ds = load_dataset(args.dataset)
    truth_path = args.truth or args.dataset.with_name(f"{args.dataset.stem}_truth.csv")
    truth = load_ground_truth(truth_path)
    truth.check_covers(len(ds))
    base = evaluate({(p.i, p.j) for p in baseline_scored(ds.records, cfg.baseline)}, truth)
    result = run_pipeline(ds, cfg, cluster=cfg.fusion.decision == "cluster")
    multi = evaluate({(p.i, p.j) for p in result.predicted_pairs}, truth)
    print(format_comparison(base, multi))
    for name, ok in directional_checks(base, multi).items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    if not truth.true_pairs():
        print("note: no true duplicate pairs; recall is 1.0 by convention")
    if args.json:
        print('{"baseline": %s, "multimodal": %s}' % (base.to_json(), multi.to_json()))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "dedupe": cmd_dedupe,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    try:
        return COMMANDS[args.command](args, cfg)
    except ProviderError as exc:
        hint = " (transient; retrying may help)" if exc.retryable else ""
        print(f"{parser.prog}: embedding provider error: {exc}{hint}", file=sys.stderr)
        return 1
    except (DedupeError, OSError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

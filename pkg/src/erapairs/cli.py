"""``era`` command line: extract | rank | plot | report | synth."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

from . import __version__
from .agent import AgentConfig
from .config import ConfigError, read_flat_config, read_single_section
from .criteria import rank_pairs
from .extract import CATEGORY, extract_table
from .levels import LevelFormatError, corpus_files, load_classification, load_corpus, write_corpus
from .plots import MODES, PALETTES, PlotSpec, render_plot
from .report import (
    metric_frequency_csv,
    read_metric_table,
    summarize_composition,
    top_summary,
    write_metric_table,
    write_ranking,
)
from .stats import UnknownMetricError
from .synth import SynthParams, generate_corpus, benchmark_params

log = logging.getLogger("erapairs")


class CommandError(Exception):
    pass


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def corpus_fingerprint(root: Path) -> str:
    h = hashlib.sha256()
    for label, level_id, path in corpus_files(root):
        h.update(f"{label}/{level_id}\0".encode())
        h.update(path.read_bytes())
        h.update(b"\0")
    return h.hexdigest()


def write_manifest(path: Path, command: str, inputs: dict, config: dict, fingerprint: str, outputs) -> Path:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "inputs": inputs,
        "config": config,
        "corpus_fingerprint": fingerprint,
        "outputs": sorted(str(o) for o in outputs),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _manifest_for(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _load_metrics(path: str):
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"metrics CSV {path!r} not found")
    try:
        return read_metric_table(p)
    except ValueError as exc:
        raise CommandError(str(exc)) from None


def _agent_config(path: str | None) -> AgentConfig:
    if path is None:
        return AgentConfig()
    try:
        return AgentConfig.from_mapping(read_single_section(path))
    except (OSError, ConfigError, ValueError) as exc:
        raise CommandError(f"agent config {path!r}: {exc}") from None


def cmd_extract(args) -> int:
    root = Path(args.levels_dir)
    if not root.is_dir():
        raise CommandError(f"levels directory {args.levels_dir!r} not readable")
    try:
        classification = load_classification(args.tilemap)
    except (OSError, LevelFormatError) as exc:
        raise CommandError(f"tile classification: {exc}") from None
    cfg = _agent_config(args.agent_config)
    corpus = load_corpus(root, classification)
    for f in corpus.failures:
        print(f"warning: {f.path}: {f.error}", file=sys.stderr)
    if corpus.failures:
        print(f"warning: {len(corpus.failures)} level(s) skipped", file=sys.stderr)
    if not corpus:
        raise CommandError(f"no loadable levels under {args.levels_dir!r}")
    table = extract_table(corpus, cfg, threads=args.threads)
    out = write_metric_table(table, args.out)
    write_manifest(
        _manifest_for(out),
        "extract",
        {"levels_dir": args.levels_dir, "tilemap": args.tilemap, "agent_config": args.agent_config},
        {"agent": cfg.as_dict(), "levels": len(corpus), "skipped": len(corpus.failures)},
        corpus_fingerprint(root),
        [out.name],
    )
    return 0


def cmd_rank(args) -> int:
    table = _load_metrics(args.metrics_csv)
    if len(table.columns) < 3:
        raise CommandError("ranking needs at least 3 candidate metrics")
    if table.fitness is None:
        print(f"warning: no {table.fitness_name} column; FI skipped", file=sys.stderr)
    ranking = rank_pairs(table, args.grid)
    written = write_ranking(ranking, args.out, args.top)
    out = Path(args.out)
    write_manifest(
        _manifest_for(out),
        "rank",
        {"metrics_csv": args.metrics_csv},
        {"grid": args.grid, "top": args.top, "fi_skipped": ranking.fi_skipped},
        _sha256_file(Path(args.metrics_csv)),
        [w.name for w in written],
    )
    return 0


def _parse_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts) or parts[0] == parts[1]:
        raise CommandError(f"--pair expects two distinct metric names 'A,B', got {text!r}")
    return parts[0], parts[1]


def cmd_plot(args) -> int:
    table = _load_metrics(args.metrics_csv)
    pair = _parse_pair(args.pair)
    for m in pair:
        if m not in table.columns:
            raise CommandError(str(UnknownMetricError(m, table.columns)))
    spec = PlotSpec(pair, args.mode, args.grid, args.width, args.height, args.palette, args.seed)
    out = render_plot(table, spec, args.out)
    write_manifest(
        _manifest_for(out),
        "plot",
        {"metrics_csv": args.metrics_csv},
        {"pair": list(pair), "mode": args.mode, "grid": args.grid, "palette": args.palette,
         "width_px": args.width, "height_px": args.height, "seed": args.seed},
        _sha256_file(Path(args.metrics_csv)),
        [out.name],
    )
    return 0


def _render_job(job):
    table, spec, path = job
    return render_plot(table, spec, path).name


def cmd_report(args) -> int:
    table = _load_metrics(args.metrics_csv)
    if len(table.columns) < 3:
        raise CommandError("ranking needs at least 3 candidate metrics")
    if table.fitness is None:
        print(f"warning: no {table.fitness_name} column; FI skipped", file=sys.stderr)
    unknown = [m for m in table.metric_names if m not in CATEGORY]
    if unknown:
        raise CommandError(f"metrics without a Structural/Agent category: {', '.join(unknown)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ranking = rank_pairs(table, args.grid)
    outputs = [w.name for w in write_ranking(ranking, out_dir / "ranking.csv", args.top)]
    summary = summarize_composition(ranking, CATEGORY, args.top)
    (out_dir / "composition.md").write_text(summary.to_markdown(CATEGORY), encoding="utf-8")
    (out_dir / "metric_frequency.csv").write_text(
        metric_frequency_csv(summary, CATEGORY), encoding="utf-8"
    )
    outputs += ["composition.md", "metric_frequency.csv"]

    best, worst = ranking.pairs[0], ranking.pairs[-1]
    modes = [m for m in MODES if not (m == "fitness_heatmap" and table.fitness is None)]
    jobs = []
    for tag, p in (("best", best), ("worst", worst)):
        for mode in modes:
            spec = PlotSpec(p.pair, mode, args.grid, palette=args.palette, seed=args.seed)
            jobs.append((table, spec, out_dir / f"{tag}_{mode}.svg"))
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=min(args.threads, len(jobs))) as pool:
            outputs += list(pool.map(_render_job, jobs))
    else:
        outputs += [_render_job(j) for j in jobs]

    write_manifest(
        out_dir / "manifest.json",
        "report",
        {"metrics_csv": args.metrics_csv},
        {"grid": args.grid, "top": args.top, "palette": args.palette, "seed": args.seed,
         "best_pair": list(best.pair), "worst_pair": list(worst.pair),
         "fi_skipped": ranking.fi_skipped},
        _sha256_file(Path(args.metrics_csv)),
        outputs,
    )
    return 0


def _synth_params(args) -> list[SynthParams]:
    if args.preset == "benchmark":
        if args.params_file:
            raise CommandError("--preset and a params file are mutually exclusive")
        return benchmark_params(args.seed, args.per_generator, args.originals)
    if not args.params_file:
        return [SynthParams(seed=args.seed)]
    try:
        sections = read_flat_config(args.params_file)
        out = []
        for name, values in sections.items():
            extra = {"generator_label": name} if name and "generator_label" not in values else {}
            out.append(SynthParams.from_mapping(values, **extra))
    except (OSError, ConfigError, ValueError, TypeError) as exc:
        raise CommandError(f"synth params {args.params_file!r}: {exc}") from None
    labels = [p.generator_label for p in out]
    if len(set(labels)) != len(labels):
        raise CommandError("duplicate generator labels in params file")
    return out


def cmd_synth(args) -> int:
    params = _synth_params(args)
    out_dir = Path(args.out_dir)
    total = 0
    for p in params:
        total += len(write_corpus(generate_corpus(p), out_dir))
    write_manifest(
        out_dir / "manifest.json",
        "synth",
        {"params_file": args.params_file, "preset": args.preset},
        {"generators": [p.as_dict() for p in params], "levels": total},
        corpus_fingerprint(out_dir),
        sorted({p.generator_label for p in params}),
    )
    return 0


def _agent_help() -> str:
    d = AgentConfig()
    return "agent config file (key = value); defaults: " + ", ".join(
        f"{f.name}={getattr(d, f.name)}" for f in fields(AgentConfig)
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="era", description="Rank metric pairs for expressive range analysis."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute 18 metrics + Playability per level")
    p.add_argument("levels_dir", help="corpus root laid out as <generator>/<level>.txt")
    p.add_argument("--out", required=True, help="metrics CSV to write")
    p.add_argument("--tilemap", help="tile classification file (char = Class)")
    p.add_argument("--agent-config", help=_agent_help())
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank", help="score and rank every metric pair")
    p.add_argument("metrics_csv")
    p.add_argument("--out", required=True, help="ranking CSV to write")
    p.add_argument("--grid", type=int, default=20, help="cells per axis (default 20)")
    p.add_argument("--top", type=int, default=5, help="pairs per summary block (default 5)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("plot", help="render one ERA plot as SVG")
    p.add_argument("metrics_csv")
    p.add_argument("--pair", required=True, help="two metric names, 'A,B'")
    p.add_argument("--mode", choices=MODES, default="fitness_heatmap")
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--palette", choices=sorted(PALETTES), default="viridis")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--seed", type=int, default=0, help="overlay jitter seed")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("report", help="ranking, summaries and best/worst plots")
    p.add_argument("metrics_csv")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--palette", choices=sorted(PALETTES), default="viridis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("params_file", nargs="?", help="synth params (key = value, [label] sections)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--preset", choices=["benchmark"], help="9 x 1000 + 14 level ensemble")
    p.add_argument("--per-generator", type=int, default=1000)
    p.add_argument("--originals", type=int, default=14)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    for name in ("grid", "top", "threads"):
        if getattr(args, name, 1) < 1:
            parser.error(f"--{name} must be at least 1")
    try:
        return args.func(args)
    except (CommandError, UnknownMetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

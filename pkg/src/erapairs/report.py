"""CSV and Markdown serialization of metric tables and pair rankings."""

from __future__ import annotations

import csv
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .criteria import PairCriteria, RankingTable
from .stats import FITNESS, MetricTable

RANKING_COLUMNS = (
    "m1",
    "m2",
    "FI",
    "MC_signed",
    "MC_abs",
    "AMC",
    "FI_rank",
    "MC_rank",
    "AMC_rank",
    "avg_rank",
    "degenerate",
)

BLOCKS = (
    ("fi", "FI"),
    ("mc", "MC"),
    ("amc", "AMC"),
    ("avg", "Average"),
)

PAIR_CATEGORIES = ("Structural-Structural", "Structural-Agent", "Agent-Agent")


def fmt6(v: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return format(float(v), ".6g")


def sig3(v: float) -> str:
    """Three significant figures, trailing zeros kept (0.5 -> '0.500')."""
    if v is None or math.isnan(v):
        return "n/a"
    s = format(float(v), "#.3g")
    if "e" not in s:
        s = s.rstrip(".")
    return "0.00" if s in ("0.00", "-0.00") else s


def fmt_rank(v: float) -> str:
    if math.isnan(v):
        return "n/a"
    return format(v, ".4g")


def _open_text(path: str | os.PathLike[str]):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def metric_table_csv(table: MetricTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = table.metric_names
    header = ["level_id", "generator", *names]
    if table.fitness is not None:
        header.append(table.fitness_name)
    w.writerow(header)
    cols = [table.columns[n] for n in names]
    for i, (lid, gen) in enumerate(zip(table.level_ids, table.generator_labels)):
        row = [lid, gen, *(fmt6(c[i]) for c in cols)]
        if table.fitness is not None:
            row.append(fmt6(table.fitness[i]))
        w.writerow(row)
    return buf.getvalue()


def write_metric_table(table: MetricTable, path: str | os.PathLike[str]) -> Path:
    with _open_text(path) as fh:
        fh.write(metric_table_csv(table))
    return Path(path)


def read_metric_table(path: str | os.PathLike[str], fitness_name: str = FITNESS) -> MetricTable:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty metrics CSV") from None
        if header[:2] != ["level_id", "generator"]:
            raise ValueError(f"{path}: header must start with level_id,generator")
        rows = [r for r in reader if r]
    names = header[2:]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate column names")
    for lineno, r in enumerate(rows, 2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
    values = {
        n: np.array([float(r[k + 2]) for r in rows], dtype=float) for k, n in enumerate(names)
    }
    fitness = values.pop(fitness_name, None)
    return MetricTable(
        [r[0] for r in rows], [r[1] for r in rows], values, fitness, fitness_name
    )


def ranking_csv(r: RankingTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RANKING_COLUMNS)
    for p in r.pairs:
        w.writerow(
            [
                p.m1,
                p.m2,
                fmt6(p.fi),
                fmt6(p.mc_signed),
                fmt6(p.mc),
                fmt6(p.amc),
                fmt6(p.fi_rank),
                fmt6(p.mc_rank),
                fmt6(p.amc_rank),
                fmt6(p.avg_rank),
                "true" if p.degenerate else "false",
            ]
        )
    return buf.getvalue()


def top_summary(r: RankingTable, top_n: int = 5) -> str:
    """Markdown with the best ``top_n`` pairs per criterion and by average rank.

    Scores are printed to three significant figures; MC is shown signed.
    """
    n = min(top_n, len(r.pairs))
    lines = [f"# Top {n} metric pairs", ""]
    lines.append(
        f"{len(r.pairs)} pairs of {r.n_metrics} candidate metrics, "
        f"{r.resolution}x{r.resolution} grid."
    )
    if r.fi_skipped:
        lines.append("")
        lines.append("No fitness column: FI skipped, average rank uses MC and AMC only.")
    for key, title in BLOCKS:
        lines += [
            "",
            f"## Top {n} {title} rank",
            "",
            "| Metric pair | FI score | FI rank | MC score | MC rank "
            "| AMC score | AMC rank | Avg rank |",
            "|---|---|---|---|---|---|---|---|",
        ]
        for p in r.top(key, n):
            lines.append(
                f"| {p.label} | {sig3(p.fi)} | {fmt_rank(p.fi_rank)} | {sig3(p.mc_signed)} "
                f"| {fmt_rank(p.mc_rank)} | {sig3(p.amc)} | {fmt_rank(p.amc_rank)} "
                f"| {sig3(p.avg_rank)} |"
            )
    return "\n".join(lines) + "\n"


def write_ranking(
    r: RankingTable, path: str | os.PathLike[str], top_n: int | None = None
) -> list[Path]:
    """Ranking CSV, plus a ``<stem>.summary.md`` Top-N report when ``top_n`` is set."""
    path = Path(path)
    with _open_text(path) as fh:
        fh.write(ranking_csv(r))
    written = [path]
    if top_n is not None:
        summary = path.with_name(path.stem + ".summary.md")
        with _open_text(summary) as fh:
            fh.write(top_summary(r, top_n))
        written.append(summary)
    return written


def pair_category(m1: str, m2: str, category_of) -> str:
    cats = []
    for m in (m1, m2):
        try:
            cats.append(category_of[m])
        except KeyError:
            raise ValueError(f"metric {m!r} has no category") from None
    for c in cats:
        if c not in ("Structural", "Agent"):
            raise ValueError(f"unknown category {c!r}")
    if cats[0] == cats[1]:
        return f"{cats[0]}-{cats[1]}"
    return "Structural-Agent"


@dataclass
class CompositionSummary:
    top_n: int
    blocks: dict[str, Counter]
    pool: list[tuple[str, str]]
    pool_counts: Counter
    metric_frequency: Counter
    all_pairs: Counter
    metric_names: list[str] = field(default_factory=list)

    @property
    def total_with_repeats(self) -> Counter:
        total: Counter = Counter()
        for c in self.blocks.values():
            total.update(c)
        return total

    def to_markdown(self, category_of) -> str:
        lines = [
            f"# Pair composition of the Top {self.top_n} blocks",
            "",
            "| Pair category | Avg rank | FI | MC | AMC | Total | Unique pool | All pairs |",
            "|---|---|---|---|---|---|---|---|",
        ]
        total = self.total_with_repeats
        n_all = sum(self.all_pairs.values())
        for cat in PAIR_CATEGORIES:
            b = self.blocks
            lines.append(
                f"| {cat} | {b['avg'][cat]} | {b['fi'][cat]} | {b['mc'][cat]} | {b['amc'][cat]} "
                f"| {total[cat]} | {self.pool_counts[cat]} | {self.all_pairs[cat]} of {n_all} |"
            )
        lines += [
            "",
            f"# Metric appearances in the unique pool ({len(self.pool)} pairs)",
            "",
            "| Metric | Category | Appearances |",
            "|---|---|---|",
        ]
        for name, count in self.frequency_rows():
            lines.append(f"| {name} | {category_of[name]} | {count} |")
        return "\n".join(lines) + "\n"

    def frequency_rows(self) -> list[tuple[str, int]]:
        return sorted(
            ((m, self.metric_frequency[m]) for m in self.metric_names),
            key=lambda t: (-t[1], t[0]),
        )


def summarize_composition(r: RankingTable, category_of, top_n: int = 5) -> CompositionSummary:
    names = sorted({m for p in r.pairs for m in p.pair})
    for m in names:
        if m not in category_of:
            raise ValueError(f"metric {m!r} has no category")
    blocks: dict[str, Counter] = {}
    pool: list[tuple[str, str]] = []
    for key, _ in BLOCKS:
        if key == "fi" and r.fi_skipped:
            blocks[key] = Counter()
            continue
        picked = r.top(key, top_n)
        blocks[key] = Counter(pair_category(p.m1, p.m2, category_of) for p in picked)
        for p in picked:
            if p.pair not in pool:
                pool.append(p.pair)
    pool_counts = Counter(pair_category(a, b, category_of) for a, b in pool)
    freq = Counter(m for pair in pool for m in pair)
    all_pairs = Counter(pair_category(p.m1, p.m2, category_of) for p in r.pairs)
    return CompositionSummary(top_n, blocks, pool, pool_counts, freq, all_pairs, names)


def metric_frequency_csv(summary: CompositionSummary, category_of) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "category", "appearances"])
    for name, count in summary.frequency_rows():
        w.writerow([name, category_of[name], count])
    return buf.getvalue()


def pairs_by_avg(r: RankingTable) -> list[PairCriteria]:
    return sorted(r.pairs, key=lambda p: (p.avg_rank, p.m1, p.m2))

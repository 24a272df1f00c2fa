"""Per-level metric extraction into a MetricTable."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .agent import AGENT_METRICS, AgentConfig, extract_agent_metrics, run_agent
from .levels import TileGrid
from .stats import FITNESS, MetricTable
from .structural import STRUCTURAL_METRICS, structural_metrics

CANDIDATE_METRICS = STRUCTURAL_METRICS + AGENT_METRICS

CATEGORY = {name: "Structural" for name in STRUCTURAL_METRICS} | {
    name: "Agent" for name in AGENT_METRICS
}


def level_metrics(g: TileGrid, cfg: AgentConfig | None = None) -> dict[str, float]:
    """All 18 candidate metrics plus Playability for one level."""
    cfg = cfg or AgentConfig()
    row = structural_metrics(g)
    agent = extract_agent_metrics(run_agent(g, cfg), g, cfg)
    row.update(agent.as_row())
    row[FITNESS] = agent.playability
    return row


def _rows(args):
    grids, cfg = args
    return [level_metrics(g, cfg) for g in grids]


def extract_table(grids, cfg: AgentConfig | None = None, threads: int = 1) -> MetricTable:
    """Metric table in corpus order; ``threads > 1`` uses worker processes."""
    grids = list(grids)
    cfg = cfg or AgentConfig()
    if threads > 1 and len(grids) > 1:
        n = min(threads, len(grids))
        chunk = -(-len(grids) // (n * 4))
        batches = [(grids[i : i + chunk], cfg) for i in range(0, len(grids), chunk)]
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = [r for batch in pool.map(_rows, batches) for r in batch]
    else:
        rows = _rows((grids, cfg))
    columns = {
        name: np.array([r[name] for r in rows], dtype=float) for name in CANDIDATE_METRICS
    }
    return MetricTable(
        [g.level_id for g in grids],
        [g.generator_label for g in grids],
        columns,
        np.array([r[FITNESS] for r in rows], dtype=float),
    )

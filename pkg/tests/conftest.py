from __future__ import annotations

import numpy as np
import pytest

from erapairs.levels import TileGrid, default_classification, parse_level
from erapairs.stats import MetricTable


def grid(*rows: str, level_id: str = "lvl", label: str = "gen") -> TileGrid:
    return parse_level("\n".join(rows), default_classification(), level_id, label)


def flat_floor(width: int = 10, height: int = 3) -> TileGrid:
    return grid(*(["-" * width] * (height - 1)), "X" * width)


def table(columns: dict, fitness=None, labels=None) -> MetricTable:
    n = len(next(iter(columns.values())))
    return MetricTable(
        [f"l{i}" for i in range(n)],
        list(labels) if labels is not None else ["g"] * n,
        {k: np.asarray(v, dtype=float) for k, v in columns.items()},
        None if fitness is None else np.asarray(fitness, dtype=float),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

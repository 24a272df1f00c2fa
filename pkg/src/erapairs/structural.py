"""Structural metrics computed from the tile grid alone."""

from __future__ import annotations

import numpy as np

from .levels import TileClass, TileGrid

STRUCTURAL_METRICS = (
    "Contiguity",
    "Linearity",
    "BlockCount",
    "EnemyCount",
    "RewardCount",
    "EmptyCount",
    "PipeCount",
    "Density",
    "ClearColumns",
)

PASSABLE = (TileClass.EMPTY, TileClass.ENEMY, TileClass.REWARD)
SUPPORT = (TileClass.SOLID, TileClass.PIPE)


def _solid(g: TileGrid) -> np.ndarray:
    return g.cells == TileClass.SOLID


def _horizontal_neighbour(mask: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mask)
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def contiguity(g: TileGrid) -> float:
    """Solid tiles with at least one solid 4-neighbour. Each tile counts once."""
    s = _solid(g)
    near = _horizontal_neighbour(s)
    near[1:, :] |= s[:-1, :]
    near[:-1, :] |= s[1:, :]
    return float(np.count_nonzero(s & near))


def linearity(g: TileGrid) -> float:
    s = _solid(g)
    return float(np.count_nonzero(s & _horizontal_neighbour(s)))


def _count(g: TileGrid, cls: TileClass) -> float:
    return float(np.count_nonzero(g.cells == cls))


def block_count(g: TileGrid) -> float:
    return _count(g, TileClass.SOLID)


def enemy_count(g: TileGrid) -> float:
    return _count(g, TileClass.ENEMY)


def reward_count(g: TileGrid) -> float:
    return _count(g, TileClass.REWARD)


def empty_count(g: TileGrid) -> float:
    return _count(g, TileClass.EMPTY)


def pipe_count(g: TileGrid) -> float:
    return _count(g, TileClass.PIPE)


def standable_mask(g: TileGrid) -> np.ndarray:
    """Passable cells (empty, enemy, reward) resting on a solid or pipe tile.

    The bottom row is never standable: there is nothing below it.
    """
    passable = np.isin(g.cells, PASSABLE)
    support = np.isin(g.cells, SUPPORT)
    out = np.zeros_like(passable)
    out[:-1, :] = passable[:-1, :] & support[1:, :]
    return out


def density(g: TileGrid) -> float:
    return np.count_nonzero(standable_mask(g)) / g.width


def clear_columns(g: TileGrid) -> float:
    return float(np.count_nonzero(np.all(g.cells == TileClass.EMPTY, axis=0)))


_FUNCS = (
    contiguity,
    linearity,
    block_count,
    enemy_count,
    reward_count,
    empty_count,
    pipe_count,
    density,
    clear_columns,
)


def structural_metrics(g: TileGrid) -> dict[str, float]:
    return {name: f(g) for name, f in zip(STRUCTURAL_METRICS, _FUNCS)}

"""Rank correlation and min-max grid binning over a metric table."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

FITNESS = "Playability"

# Bin positions this close below an integer boundary snap up to it, so that
# affine rescaling of a column cannot move a level across a cell edge.
_EDGE_TOL = 1e-9


class UnknownMetricError(KeyError):
    def __init__(self, name: str, available):
        self.name = name
        self.available = list(available)
        super().__init__(name)

    def __str__(self) -> str:
        return f"unknown metric {self.name!r}; available: {', '.join(self.available)}"


@dataclass
class MetricTable:
    level_ids: list[str]
    generator_labels: list[str]
    columns: dict[str, np.ndarray]
    fitness: np.ndarray | None = None
    fitness_name: str = FITNESS

    def __post_init__(self) -> None:
        n = len(self.level_ids)
        if len(self.generator_labels) != n:
            raise ValueError("generator_labels and level_ids differ in length")
        cols = {}
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"column {name!r} has shape {arr.shape}, expected ({n},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"column {name!r} contains non-finite values")
            cols[name] = arr
        if self.fitness_name in cols:
            raise ValueError(f"fitness column {self.fitness_name!r} cannot be a candidate")
        self.columns = cols
        if self.fitness is not None:
            fit = np.asarray(self.fitness, dtype=float)
            if fit.shape != (n,):
                raise ValueError("fitness length differs from level count")
            if not np.all((fit >= 0) & (fit <= 1)):
                raise ValueError("fitness values must lie in [0, 1]")
            self.fitness = fit

    def __len__(self) -> int:
        return len(self.level_ids)

    @property
    def metric_names(self) -> list[str]:
        return list(self.columns)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownMetricError(name, self.columns) from None

    def take(self, order) -> MetricTable:
        """Rows reordered (or subset) by index array ``order``."""
        order = np.asarray(order)
        return MetricTable(
            [self.level_ids[i] for i in order],
            [self.generator_labels[i] for i in order],
            {k: v[order] for k, v in self.columns.items()},
            None if self.fitness is None else self.fitness[order],
            self.fitness_name,
        )

    def with_column(self, name: str, values) -> MetricTable:
        cols = dict(self.columns)
        cols[name] = np.asarray(values, dtype=float)
        return MetricTable(
            list(self.level_ids), list(self.generator_labels), cols, self.fitness, self.fitness_name
        )


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(x)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot rank an empty vector")
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], n]
    # positions start..end-1 (0-based) share rank (start + end + 1) / 2
    shared = (starts + ends + 1) / 2.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = np.repeat(shared, ends - starts)
    return ranks


def _centered_ranks(x) -> np.ndarray:
    r = average_ranks(x)
    # the mean of average ranks is exactly (n + 1) / 2
    return r - (len(r) + 1) / 2.0


def _rho_centered(a: np.ndarray, b: np.ndarray) -> float:
    saa = math.fsum(a * a)
    sbb = math.fsum(b * b)
    if saa == 0.0 or sbb == 0.0:
        return 0.0
    r = math.fsum(a * b) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class Correlation:
    rho: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.rho


def spearman(x, y) -> Correlation:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("spearman correlation needs at least two observations")
    a, b = _centered_ranks(x), _centered_ranks(y)
    degenerate = not a.any() or not b.any()
    if degenerate:
        log.warning("constant vector in rank correlation; reporting rho = 0")
        return Correlation(0.0, True)
    return Correlation(_rho_centered(a, b))


def spearman_rho(x, y) -> float:
    """Spearman's rho as the Pearson correlation of average-tie ranks.

    A constant input has no ranking information; it yields 0 (see
    :func:`spearman` for the degeneracy flag).
    """
    return spearman(x, y).rho


@dataclass
class CorrelationMatrix:
    names: list[str]
    rho: np.ndarray
    constant: set[str] = field(default_factory=set)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownMetricError(name, self.names) from None

    def get(self, a: str, b: str) -> float:
        return float(self.rho[self.index(a), self.index(b)])


def correlation_matrix(table: MetricTable) -> CorrelationMatrix:
    names = table.metric_names
    if len(table) < 2:
        raise ValueError("correlation needs at least two levels")
    centered = [_centered_ranks(table.columns[n]) for n in names]
    sq = [math.fsum(c * c) for c in centered]
    constant = {n for n, s in zip(names, sq) if s == 0.0}
    if constant:
        log.warning("constant metric column(s) %s; their correlations are 0", sorted(constant))
    k = len(names)
    rho = np.eye(k)
    for i in range(k):
        if sq[i] == 0.0:
            rho[i, i] = 0.0
            continue
        for j in range(i + 1, k):
            if sq[j] == 0.0:
                continue
            r = math.fsum(centered[i] * centered[j]) / math.sqrt(sq[i] * sq[j])
            rho[i, j] = rho[j, i] = min(1.0, max(-1.0, r))
    return CorrelationMatrix(names, rho, constant)


@dataclass
class GridHistogram:
    resolution: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    counts: np.ndarray
    fitness_sums: np.ndarray
    x_constant: bool = False
    y_constant: bool = False

    @property
    def degenerate(self) -> bool:
        return self.x_constant or self.y_constant

    def mean_fitness(self) -> np.ndarray:
        """Per-cell mean fitness; NaN where a cell holds no levels."""
        out = np.full(self.counts.shape, np.nan)
        occ = self.counts > 0
        out[occ] = self.fitness_sums[occ] / self.counts[occ]
        return out


def bin_index(values: np.ndarray, resolution: int) -> tuple[np.ndarray, float, float, bool]:
    """Min-max cell index per value, upper edge closed into the last cell."""
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return np.zeros(len(values), dtype=np.int64), lo, hi, True
    pos = resolution * (values - lo) / (hi - lo)
    idx = np.floor(pos + _EDGE_TOL).astype(np.int64)
    np.clip(idx, 0, resolution - 1, out=idx)
    return idx, lo, hi, False


def bin_pair(table: MetricTable, m1: str, m2: str, resolution: int = 20) -> GridHistogram:
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    x = table.column(m1)
    y = table.column(m2)
    if len(x) == 0:
        raise ValueError("cannot bin an empty table")
    ix, x_lo, x_hi, x_const = bin_index(x, resolution)
    iy, y_lo, y_hi, y_const = bin_index(y, resolution)
    cell = ix * resolution + iy
    counts = np.bincount(cell, minlength=resolution * resolution)
    if table.fitness is not None:
        # summing in (cell, value) order makes sums independent of row order
        order = np.lexsort((table.fitness, cell))
        sums = np.bincount(
            cell[order], weights=table.fitness[order], minlength=resolution * resolution
        )
    else:
        sums = np.zeros(resolution * resolution)
    shape = (resolution, resolution)
    return GridHistogram(
        resolution,
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        counts.reshape(shape),
        sums.reshape(shape),
        x_const,
        y_const,
    )

"""Selection criteria for ERA metric pairs and their ranking.

For every unordered pair of candidate metrics:

* FI (fitness independence): mean per-cell fitness over the whole
  min-max grid, empty cells counting as zero. Higher is better.
* MC (mutual correlation): |Spearman rho| between the two metrics. Lower
  is better.
* AMC (alternative metric correlation): for every other metric, the larger
  of its |rho| with either pair member, averaged. Higher is better.

Pairs are ranked per criterion (ties share average ranks) and by the
unweighted mean of the three ranks.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .stats import (
    CorrelationMatrix,
    MetricTable,
    average_ranks,
    bin_pair,
    correlation_matrix,
    spearman_rho,
)

log = logging.getLogger(__name__)


@dataclass
class PairCriteria:
    m1: str
    m2: str
    fi: float
    mc: float
    mc_signed: float
    amc: float
    fi_rank: float = float("nan")
    mc_rank: float = float("nan")
    amc_rank: float = float("nan")
    avg_rank: float = float("nan")
    degenerate: bool = False

    @property
    def pair(self) -> tuple[str, str]:
        return self.m1, self.m2

    @property
    def label(self) -> str:
        return f"{self.m1}-{self.m2}"


@dataclass
class RankingTable:
    pairs: list[PairCriteria]
    n_metrics: int
    resolution: int = 20
    fi_skipped: bool = False

    def __len__(self) -> int:
        return len(self.pairs)

    def find(self, m1: str, m2: str) -> PairCriteria:
        for p in self.pairs:
            if {p.m1, p.m2} == {m1, m2} and (m1 != m2):
                return p
        raise KeyError(f"pair {m1}-{m2} not ranked")

    def top(self, criterion: str, n: int) -> list[PairCriteria]:
        """Best ``n`` pairs by ``criterion`` in {'fi', 'mc', 'amc', 'avg'}."""
        attr = {"fi": "fi_rank", "mc": "mc_rank", "amc": "amc_rank", "avg": "avg_rank"}[criterion]

        def key(p: PairCriteria):
            v = getattr(p, attr)
            return (math.inf if math.isnan(v) else v, p.m1, p.m2)

        ordered = sorted(self.pairs, key=key)
        return ordered[: max(n, 0)]


def compute_fi(table: MetricTable, m1: str, m2: str, resolution: int = 20) -> float:
    if table.fitness is None:
        raise ValueError("fitness independence needs a fitness column")
    return _fi(bin_pair(table, m1, m2, resolution))


def _fi(hist) -> float:
    # empty cells contribute zero fitness to the grid mean
    mean = np.nan_to_num(hist.mean_fitness(), nan=0.0)
    return float(mean.sum() / mean.size)


def compute_mc(
    table: MetricTable, m1: str, m2: str, corr: CorrelationMatrix | None = None
) -> tuple[float, float]:
    if corr is None:
        rho = spearman_rho(table.column(m1), table.column(m2))
    else:
        rho = corr.get(m1, m2)
    return rho, abs(rho)


def _amc_from_matrix(absrho: np.ndarray, i: int, j: int) -> float:
    k = absrho.shape[0]
    alt = [a for a in range(k) if a != i and a != j]
    return float(np.mean(np.maximum(absrho[alt, i], absrho[alt, j])))


def compute_amc(
    table: MetricTable, m1: str, m2: str, corr: CorrelationMatrix | None = None
) -> float:
    if len(table.columns) < 3:
        raise ValueError("alternative metric correlation needs at least 3 candidate metrics")
    corr = corr or correlation_matrix(table)
    return _amc_from_matrix(np.abs(corr.rho), corr.index(m1), corr.index(m2))


def rank_pairs(table: MetricTable, resolution: int = 20) -> RankingTable:
    names = table.metric_names
    if len(names) < 3:
        raise ValueError("ranking needs at least 3 candidate metrics")
    fi_skipped = table.fitness is None
    if fi_skipped:
        log.warning("no %s column: fitness independence skipped", table.fitness_name)

    corr = correlation_matrix(table)
    absrho = np.abs(corr.rho)
    pairs: list[PairCriteria] = []
    for i, j in itertools.combinations(range(len(names)), 2):
        m1, m2 = names[i], names[j]
        if fi_skipped:
            fi, degenerate = float("nan"), False
        else:
            hist = bin_pair(table, m1, m2, resolution)
            fi, degenerate = _fi(hist), hist.degenerate
        rho = float(corr.rho[i, j])
        degenerate = degenerate or m1 in corr.constant or m2 in corr.constant
        pairs.append(
            PairCriteria(
                m1, m2, fi, abs(rho), rho, _amc_from_matrix(absrho, i, j), degenerate=degenerate
            )
        )

    mc_rank = average_ranks(np.array([p.mc for p in pairs]))
    amc_rank = average_ranks(-np.array([p.amc for p in pairs]))
    if fi_skipped:
        fi_rank = np.full(len(pairs), np.nan)
    else:
        fi_rank = average_ranks(-np.array([p.fi for p in pairs]))
    for p, fr, mr, ar in zip(pairs, fi_rank, mc_rank, amc_rank):
        p.fi_rank, p.mc_rank, p.amc_rank = float(fr), float(mr), float(ar)
        ranks = (mr, ar) if fi_skipped else (fr, mr, ar)
        p.avg_rank = float(sum(ranks) / len(ranks))
    pairs.sort(key=lambda p: (p.avg_rank, p.m1, p.m2))
    return RankingTable(pairs, len(names), resolution, fi_skipped)

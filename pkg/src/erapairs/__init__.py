"""Metric-pair selection criteria for expressive range analysis of level corpora."""

__version__ = "0.1.0"

from .agent import AgentConfig, PlayTrace, build_reachability, extract_agent_metrics, run_agent
from .criteria import PairCriteria, RankingTable, compute_amc, compute_fi, compute_mc, rank_pairs
from .extract import CANDIDATE_METRICS, CATEGORY, extract_table, level_metrics
from .levels import TileClass, TileGrid, load_classification, load_corpus, parse_level
from .stats import GridHistogram, MetricTable, average_ranks, bin_pair, spearman_rho

__all__ = [
    "AgentConfig",
    "CANDIDATE_METRICS",
    "CATEGORY",
    "GridHistogram",
    "MetricTable",
    "PairCriteria",
    "PlayTrace",
    "RankingTable",
    "TileClass",
    "TileGrid",
    "average_ranks",
    "bin_pair",
    "build_reachability",
    "compute_amc",
    "compute_fi",
    "compute_mc",
    "extract_agent_metrics",
    "extract_table",
    "level_metrics",
    "load_classification",
    "load_corpus",
    "parse_level",
    "rank_pairs",
    "run_agent",
    "spearman_rho",
]

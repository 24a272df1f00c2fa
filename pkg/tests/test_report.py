from __future__ import annotations

import csv
import io
import itertools
import re

import numpy as np
import pytest

from conftest import table
from erapairs.criteria import rank_pairs
from erapairs.extract import CANDIDATE_METRICS, CATEGORY
from erapairs.report import (
    RANKING_COLUMNS,
    metric_frequency_csv,
    metric_table_csv,
    pair_category,
    ranking_csv,
    read_metric_table,
    sig3,
    summarize_composition,
    top_summary,
    write_metric_table,
    write_ranking,
)


def _random_table(rng, n, names=CANDIDATE_METRICS, labels=None):
    cols = {m: rng.integers(0, 40, n).astype(float) for m in names}
    return table(cols, rng.uniform(0, 1, n), labels)


def test_metric_csv_round_trip(tmp_path, rng):
    t = _random_table(rng, 50, labels=[f"g{i % 3}" for i in range(50)])
    path = write_metric_table(t, tmp_path / "m.csv")
    back = read_metric_table(path)
    assert back.level_ids == t.level_ids
    assert back.generator_labels == t.generator_labels
    assert back.metric_names == t.metric_names
    for m in t.metric_names:
        np.testing.assert_array_equal(back.column(m), t.column(m))
    # six significant figures on disk
    np.testing.assert_allclose(back.fitness, t.fitness, rtol=5e-6, atol=1e-9)


def test_three_level_csv_has_header_and_three_rows(rng):
    text = metric_table_csv(_random_table(rng, 3))
    lines = text.splitlines()
    assert len(lines) == 4
    header = lines[0].split(",")
    assert header[:2] == ["level_id", "generator"]
    assert header[-1] == "Playability"
    assert len(header) == 21


def test_full_size_round_trip(tmp_path, rng):
    t = _random_table(rng, 9014)
    back = read_metric_table(write_metric_table(t, tmp_path / "big.csv"))
    assert len(back) == 9014
    np.testing.assert_array_equal(back.column("Speed"), t.column("Speed"))


def test_ragged_csv_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("level_id,generator,A,B\nl0,g,1,2\nl1,g,3\n")
    with pytest.raises(ValueError, match="expected 4 fields"):
        read_metric_table(p)


def test_missing_fitness_column_reads_as_none(tmp_path):
    p = tmp_path / "nofit.csv"
    p.write_text("level_id,generator,A,B,C\nl0,g,1,2,3\nl1,g,2,1,0\n")
    t = read_metric_table(p)
    assert t.fitness is None
    assert t.metric_names == ["A", "B", "C"]


def test_ranking_csv_columns_and_row_count(rng):
    r = rank_pairs(_random_table(rng, 200))
    rows = list(csv.reader(io.StringIO(ranking_csv(r))))
    assert tuple(rows[0]) == RANKING_COLUMNS
    assert len(rows) == 1 + 153
    avg = [float(row[9]) for row in rows[1:]]
    assert avg == sorted(avg)


@pytest.mark.parametrize(
    "v, s",
    [(0.5, "0.500"), (0.12345, "0.123"), (1.0, "1.00"), (12.345, "12.3"), (-0.8208, "-0.821"),
     (0.0, "0.00"), (float("nan"), "n/a")],
)
def test_sig3(v, s):
    assert sig3(v) == s


def _block_rows(md: str) -> list[list[str]]:
    blocks, cur = [], None
    for line in md.splitlines():
        if line.startswith("## "):
            cur = []
            blocks.append(cur)
        elif cur is not None and line.startswith("| ") and not line.startswith("| Metric pair"):
            cur.append(line)
    return blocks


def test_top_summary_has_four_blocks_of_five(rng):
    md = top_summary(rank_pairs(_random_table(rng, 300)), 5)
    titles = re.findall(r"^## Top 5 (\w+) rank$", md, flags=re.M)
    assert titles == ["FI", "MC", "AMC", "Average"]
    blocks = _block_rows(md)
    assert [len(b) for b in blocks] == [5, 5, 5, 5]
    for b in blocks:
        for row in b:
            cells = [c.strip() for c in row.strip("|").split("|")]
            for score in (cells[1], cells[3], cells[5]):
                digits = score.lstrip("-").replace(".", "").lstrip("0")
                assert len(digits) == 3 or score in ("0.00", "1.00"), score


def test_top_n_clamped_to_pair_count(rng):
    t = _random_table(rng, 30, names=["A", "B", "C"])
    md = top_summary(rank_pairs(t), 10)
    assert [len(b) for b in _block_rows(md)] == [3, 3, 3, 3]
    assert "# Top 3 metric pairs" in md


def test_write_ranking_emits_summary(tmp_path, rng):
    out = write_ranking(rank_pairs(_random_table(rng, 40, names=["A", "B", "C", "D"])), tmp_path / "r.csv", 2)
    assert [p.name for p in out] == ["r.csv", "r.summary.md"]


def test_pair_category():
    cat = {"A": "Structural", "B": "Agent", "C": "Structural"}
    assert pair_category("A", "C", cat) == "Structural-Structural"
    assert pair_category("B", "A", cat) == "Structural-Agent"
    assert pair_category("B", "B", cat) == "Agent-Agent"
    with pytest.raises(ValueError):
        pair_category("A", "Z", cat)


def test_nine_nine_split_gives_81_mixed_pairs(rng):
    s = summarize_composition(rank_pairs(_random_table(rng, 100)), CATEGORY, 5)
    assert s.all_pairs == {"Structural-Structural": 36, "Structural-Agent": 81, "Agent-Agent": 36}


def test_all_structural_composition():
    rng = np.random.default_rng(3)
    names = ["S1", "S2", "S3", "S4", "S5", "S6"]
    cat = {n: "Structural" for n in names}
    s = summarize_composition(rank_pairs(_random_table(rng, 80, names=names)), cat, 5)
    md = s.to_markdown(cat)
    row = next(l for l in md.splitlines() if l.startswith("| Structural-Structural"))
    cells = [c.strip() for c in row.strip("|").split("|")]
    assert cells[1:5] == ["5", "5", "5", "5"]
    assert s.pool_counts["Structural-Agent"] == 0
    assert s.pool_counts["Agent-Agent"] == 0
    assert s.pool_counts["Structural-Structural"] == len(s.pool)


def test_pool_is_union_of_blocks(rng):
    r = rank_pairs(_random_table(rng, 150))
    s = summarize_composition(r, CATEGORY, 5)
    picked = [p.pair for key in ("fi", "mc", "amc", "avg") for p in r.top(key, 5)]
    assert len(s.pool) == len(set(picked))
    assert sum(s.total_with_repeats.values()) == 20
    assert sum(s.metric_frequency.values()) == 2 * len(s.pool)
    rows = list(csv.reader(io.StringIO(metric_frequency_csv(s, CATEGORY))))
    assert rows[0] == ["metric", "category", "appearances"]
    assert sum(int(r[2]) for r in rows[1:]) == 2 * len(s.pool)
    assert len(rows) - 1 == 18


def test_composition_without_fitness(rng):
    cols = {m: rng.normal(size=60) for m in CANDIDATE_METRICS}
    r = rank_pairs(table(cols))
    s = summarize_composition(r, CATEGORY, 5)
    assert sum(s.blocks["fi"].values()) == 0
    assert sum(s.total_with_repeats.values()) == 15
    assert "FI skipped" in top_summary(r)


def test_every_unordered_pair_listed_once(rng):
    r = rank_pairs(_random_table(rng, 50))
    pairs = [tuple(sorted(p.pair)) for p in r.pairs]
    assert len(pairs) == len(set(pairs)) == 153
    assert set(pairs) == set(itertools.combinations(sorted(CANDIDATE_METRICS), 2))

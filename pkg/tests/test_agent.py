from __future__ import annotations

import pytest
from conftest import flat_floor, grid
from hypothesis import given, settings
from hypothesis import strategies as st

from erapairs.agent import (
    AgentConfig,
    PlayTrace,
    build_reachability,
    extract_agent_metrics,
    run_agent,
)
from erapairs.levels import TileClass, parse_level
from erapairs.synth import SynthParams, generate_level


def _gap_level(width: int, gap_cols, height: int = 3):
    floor = "".join("-" if x in gap_cols else "X" for x in range(width))
    return grid(*(["-" * width] * (height - 1)), floor)


def _wall_level(width: int = 20, k: int = 10, wall: int = 5, height: int = 8):
    rows = [["-"] * width for _ in range(height)]
    rows[-1] = ["X"] * width
    for y in range(height - 1 - wall, height - 1):
        rows[y][k] = "X"
    return grid(*("".join(r) for r in rows))


def _pillar_enemy_level():
    # floor 0..4, gap 5..11 (too wide to clear), pillar at column 8 topped by an enemy
    rows = [["-"] * 20 for _ in range(8)]
    for x in list(range(5)) + list(range(12, 20)):
        rows[7][x] = "X"
    for y in (5, 6, 7):
        rows[y][8] = "X"
    rows[4][8] = "g"
    return grid(*("".join(r) for r in rows))


def test_flat_floor_graph():
    g = build_reachability(flat_floor(10))
    assert len(g.nodes) == 10
    assert g.start == (0, 1)
    walks = [(n, m.target) for n, ms in g.edges.items() for m in ms if not m.jump]
    assert sum(1 for a, b in walks if b[0] == a[0] + 1) == 9
    assert sum(1 for a, b in walks if b[0] == a[0] - 1) == 9
    assert all(m.ticks == 1 for _, ms in g.edges.items() for m in ms if not m.jump)


def test_gap_wider_than_span_has_no_crossing_edge():
    cfg = AgentConfig()
    level = _gap_level(20, set(range(6, 6 + cfg.max_jump_span + 1)))
    g = build_reachability(level, cfg)
    crossing = [m for n, ms in g.edges.items() for m in ms if (n[0] < 6) != (m.target[0] < 6)]
    assert crossing == []


def test_two_tile_jump_costs_four_air_ticks():
    # one missing column: the edge from the gap's lip to the far lip spans 2 columns
    g = build_reachability(_gap_level(10, {5}))
    [move] = [m for m in g.edges[(4, 1)] if m.target == (6, 1)]
    assert move.jump and move.ticks == 4


def test_flat_floor_run():
    trace = run_agent(flat_floor(10))
    m = extract_agent_metrics(trace, flat_floor(10))
    assert trace.completed and trace.reached_x == 9
    assert m.playability == 1.0
    assert m.jump_count == 0
    assert m.on_ground_ratio == 1.0
    assert trace.total_ticks == 9


def test_flat_floor_metrics_arithmetic():
    m = extract_agent_metrics(run_agent(flat_floor(10)), flat_floor(10))
    assert m.time_taken == pytest.approx(9 / 24)
    assert m.speed == pytest.approx(1 / (9 / 24))
    assert round(m.speed, 3) == 2.667
    assert m.average_y == 1.0
    assert m.jump_entropy == 0 and m.max_jump_air_time == 0


def test_unjumpable_wall_stops_agent():
    cfg = AgentConfig()
    level = _wall_level(20, k=10, wall=cfg.max_jump_height + 1)
    trace = run_agent(level, cfg)
    m = extract_agent_metrics(trace, level, cfg)
    assert not trace.completed
    assert trace.reached_x == 9
    assert m.playability == pytest.approx(9 / 19)
    assert abs(m.playability - 10 / 19) <= 1 / 19


def test_wall_of_jump_height_is_cleared():
    level = _wall_level(20, k=10, wall=AgentConfig().max_jump_height)
    assert run_agent(level).completed


def test_enemy_on_only_route_is_stomped():
    level = _pillar_enemy_level()
    trace = run_agent(level)
    assert trace.completed
    assert (8, 4) in trace.path
    assert trace.stomp_kills == 1 and trace.total_enemy_deaths == 1
    m = extract_agent_metrics(trace, level)
    assert m.kills_by_stomp == 1 and m.total_enemy_deaths == 1


def test_cannot_walk_into_enemy():
    g = build_reachability(grid("-----", "--g--", "XXXXX"))
    assert all(m.jump for m in g.edges[(1, 1)] if m.target == (2, 1))


def test_one_jump_in_twenty_ticks():
    # 16 grounded ticks walking x 0..16, then one 4-tick jump to x 19
    steps = [(0, 1, False, 0)] + [(t, 1, False, t) for t in range(1, 17)]
    steps += [(17, 0, True, 17), (18, 0, True, 18), (18, 0, True, 19), (19, 1, True, 20)]
    trace = PlayTrace(steps, [4], 0, 0, 19, True, 20, 20)
    m = extract_agent_metrics(trace, cfg=AgentConfig())
    assert m.on_ground_ratio == pytest.approx(16 / 20)
    assert m.max_jump_air_time == 4
    assert m.jump_entropy == pytest.approx(1 / 20)
    assert m.playability == 1.0


def test_gap_crossing_run_accounts_every_tick():
    level = _gap_level(19, {9})
    trace = run_agent(level)
    m = extract_agent_metrics(trace, level)
    # a jump over d columns costs 2 + d ticks, so every route costs width + 1
    assert trace.completed and trace.total_ticks == 20
    assert len(trace.jumps) == 1
    assert m.on_ground_ratio == pytest.approx((20 - trace.jumps[0]) / 20)


def test_no_standable_cell_is_unplayable():
    level = grid("---", "---")
    trace = run_agent(level)
    m = extract_agent_metrics(trace, level)
    assert m.playability == 0.0 and not trace.completed


def test_single_column_level_is_degenerate():
    level = grid("-", "X")
    m = extract_agent_metrics(run_agent(level), level)
    assert m.degenerate
    assert m.time_taken == pytest.approx(1 / 24)
    assert m.playability == 1.0


def test_budget_exhaustion_is_flagged():
    trace = run_agent(flat_floor(30), AgentConfig(max_expansions=5))
    assert trace.budget_exhausted and not trace.completed
    assert trace.reached_x == 4


def test_trace_ticks_strictly_increase():
    level = _pillar_enemy_level()
    ticks = [s[3] for s in run_agent(level).steps]
    assert all(b > a for a, b in zip(ticks, ticks[1:]))


def test_agent_config_from_mapping():
    cfg = AgentConfig.from_mapping({"max_jump_height": "3", "ticks_per_second": "30"})
    assert cfg.max_jump_height == 3 and cfg.ticks_per_second == 30.0
    with pytest.raises(ValueError):
        AgentConfig.from_mapping({"gravity": "1"})
    with pytest.raises(ValueError):
        AgentConfig(max_jump_span=0)


@st.composite
def levels(draw):
    """Random small levels: mostly synthetic, sometimes noise grids."""
    if draw(st.booleans()):
        p = SynthParams(
            seed=draw(st.integers(0, 10_000)),
            width=draw(st.integers(8, 40)),
            height=draw(st.integers(6, 10)),
            level_count=1,
            gap_prob=draw(st.floats(0, 0.3)),
            enemy_prob=draw(st.floats(0, 0.3)),
            pipe_prob=draw(st.floats(0, 0.2)),
            height_walk_step=draw(st.integers(0, 3)),
        )
        return generate_level(p, 0)
    w = draw(st.integers(2, 14))
    h = draw(st.integers(3, 8))
    rows = [draw(st.text(alphabet="---Xgo<", min_size=w, max_size=w)) for _ in range(h - 1)]
    return parse_level("\n".join(rows + ["X" * w]))


@given(levels())
@settings(max_examples=150, deadline=None)
def test_trace_invariants(level):
    t = run_agent(level)
    m = extract_agent_metrics(t, level)
    assert t == run_agent(level)
    assert t.reached_x <= level.width - 1
    assert (not t.completed) or t.reached_x == level.width - 1
    assert t.completed == (m.playability == 1.0)
    assert t.stomp_kills <= t.total_enemy_deaths <= int((level.cells == TileClass.ENEMY).sum())
    assert 0.0 <= m.on_ground_ratio <= 1.0 and 0.0 <= m.playability <= 1.0
    if t.total_ticks:
        assert m.on_ground_ratio + sum(t.jumps) / t.total_ticks == pytest.approx(1.0)
    ticks = [s[3] for s in t.steps]
    assert ticks == sorted(set(ticks))
    assert m.max_jump_air_time == max(t.jumps, default=0)


@given(levels(), st.integers(1, 60))
@settings(max_examples=100, deadline=None)
def test_more_budget_never_lowers_progress(level, budget):
    low = run_agent(level, AgentConfig(max_expansions=budget))
    high = run_agent(level, AgentConfig(max_expansions=budget * 3))
    assert high.reached_x >= low.reached_x


@given(levels())
@settings(max_examples=150, deadline=None)
def test_removing_enemies_never_lowers_playability(level):
    text = level.to_text()
    for ch in "EgGkKrRyY":
        text = text.replace(ch, "-")
    calm = parse_level(text)
    before = extract_agent_metrics(run_agent(level), level).playability
    after = extract_agent_metrics(run_agent(calm), calm).playability
    assert after >= before

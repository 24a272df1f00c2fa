"""A deterministic tile-granular platformer agent and its play metrics.

The agent searches a jump-reachability graph over standable cells with A*.
Walking costs ``ticks_per_tile_walk`` ticks per column; a jump arc spanning
``d`` columns costs ``2 + d`` airborne ticks. Enemies are static: landing on
one from a jump kills it, walking into one is impossible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

from .levels import TileClass, TileGrid

AGENT_METRICS = (
    "JumpCount",
    "JumpEntropy",
    "Speed",
    "TimeTaken",
    "TotalEnemyDeaths",
    "KillsByStomp",
    "MaxJumpAirTime",
    "OnGroundRatio",
    "AverageY",
)


@dataclass(frozen=True)
class AgentConfig:
    max_jump_height: int = 4
    max_jump_span: int = 6
    ticks_per_tile_walk: int = 1
    ticks_per_second: float = 24.0
    max_expansions: int = 200_000

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"AgentConfig.{f.name} must be positive")

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> AgentConfig:
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown agent option {key!r}")
            kwargs[key] = float(raw) if key == "ticks_per_second" else int(raw)
        return cls(**kwargs)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Move:
    target: tuple[int, int]
    ticks: int
    jump: bool
    stomp: bool = False
    apex: int = 0


@dataclass
class MoveGraph:
    start: tuple[int, int] | None
    goal_x: int
    edges: dict[tuple[int, int], list[Move]]

    @property
    def nodes(self) -> list[tuple[int, int]]:
        return list(self.edges)


@dataclass
class PlayTrace:
    steps: list[tuple[int, int, bool, int]]
    jumps: list[int]
    stomp_kills: int
    total_enemy_deaths: int
    reached_x: int
    completed: bool
    total_ticks: int
    width: int
    budget_exhausted: bool = False
    path: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class AgentMetrics:
    playability: float
    jump_count: int
    jump_entropy: float
    speed: float
    time_taken: float
    total_enemy_deaths: int
    kills_by_stomp: int
    max_jump_air_time: int
    on_ground_ratio: float
    average_y: float
    degenerate: bool = False

    def as_row(self) -> dict[str, float]:
        return {
            "JumpCount": float(self.jump_count),
            "JumpEntropy": self.jump_entropy,
            "Speed": self.speed,
            "TimeTaken": self.time_taken,
            "TotalEnemyDeaths": float(self.total_enemy_deaths),
            "KillsByStomp": float(self.kills_by_stomp),
            "MaxJumpAirTime": float(self.max_jump_air_time),
            "OnGroundRatio": self.on_ground_ratio,
            "AverageY": self.average_y,
        }


def _round(v: float) -> int:
    return math.floor(v + 0.5)


def _arc_height(rise: int, apex: int):
    """Height above take-off as a function of t in [0, 1].

    Quadratic through h(0) = 0 and h(1) = rise peaking at ``apex``.
    """
    b = 2 * apex + 2 * math.sqrt(apex * (apex - rise))
    a = rise - b
    return lambda t: a * t * t + b * t


@lru_cache(maxsize=None)
def _arc_cells(span: int, rise: int, apex: int) -> tuple[tuple[int, int], ...]:
    """Cells swept by an arc, relative to take-off, excluding both endpoints.

    Offsets are (dx, dy) with dy in the y-down frame and dx >= 0; callers
    mirror dx for leftward jumps.
    """
    h = _arc_height(rise, apex)
    n = 8 * (span + apex + abs(rise) + 1)
    seen: dict[tuple[int, int], None] = {}
    end = (span, -rise)
    for k in range(1, n):
        t = k / n
        cell = (_round(span * t), -_round(h(t)))
        if cell != (0, 0) and cell != end:
            seen.setdefault(cell)
    return tuple(seen)


@lru_cache(maxsize=None)
def _arc_positions(span: int, rise: int, apex: int) -> tuple[tuple[int, int], ...]:
    """Per-tick relative positions of an arc lasting ``2 + span`` ticks."""
    h = _arc_height(rise, apex)
    ticks = 2 + span
    out = [(_round(span * j / ticks), -_round(h(j / ticks))) for j in range(1, ticks)]
    out.append((span, -rise))
    return tuple(out)


class _Level:
    """Per-grid lookup tables shared by graph construction and search."""

    def __init__(self, g: TileGrid, cfg: AgentConfig):
        cells = g.cells.tolist()
        self.width = g.width
        self.height = g.height
        self.cfg = cfg
        self.clear = [[c in (TileClass.EMPTY, TileClass.REWARD) for c in row] for row in cells]
        self.enemy = [[c == TileClass.ENEMY for c in row] for row in cells]
        support = [[c in (TileClass.SOLID, TileClass.PIPE) for c in row] for row in cells]
        self.columns: list[list[int]] = [[] for _ in range(self.width)]
        self.standable = set()
        for y in range(self.height - 1):
            row, below, en = self.clear[y], support[y + 1], self.enemy[y]
            for x in range(self.width):
                if (row[x] or en[x]) and below[x]:
                    self.columns[x].append(y)
                    self.standable.add((x, y))
        self.start = None
        for x in range(self.width):
            if self.columns[x]:
                self.start = (x, self.columns[x][-1])  # lowest standable cell
                break

    def is_clear(self, x: int, y: int) -> bool:
        return y < 0 or self.clear[y][x]

    def _arc_ok(self, x: int, y: int, sign: int, span: int, rise: int, apex: int) -> bool:
        clear = self.clear
        for ox, oy in _arc_cells(span, rise, apex):
            cy = y + oy
            if cy >= 0 and not clear[cy][x + sign * ox]:
                return False
        return True

    def moves(self, node: tuple[int, int]) -> list[Move]:
        x, y = node
        cfg = self.cfg
        out: list[Move] = []
        walk = cfg.ticks_per_tile_walk
        for sign in (1, -1):
            nx = x + sign
            if not 0 <= nx < self.width:
                continue
            for ny in self.columns[nx]:
                if abs(ny - y) > 1 or self.enemy[ny][nx]:
                    continue
                if ny < y and not self.is_clear(x, y - 1):
                    continue
                if ny > y and not self.clear[y][nx]:
                    continue
                out.append(Move((nx, ny), walk, False))
        max_h = cfg.max_jump_height
        for sign in (1, -1):
            for span in range(1, cfg.max_jump_span + 1):
                nx = x + sign * span
                if not 0 <= nx < self.width:
                    break
                for ny in self.columns[nx]:
                    rise = y - ny
                    if rise > max_h:
                        continue
                    for apex in range(min(max(rise, 0) + 1, max_h), max_h + 1):
                        if self._arc_ok(x, y, sign, span, rise, apex):
                            out.append(
                                Move((nx, ny), 2 + span, True, self.enemy[ny][nx], apex)
                            )
                            break
        return out


def build_reachability(g: TileGrid, cfg: AgentConfig | None = None) -> MoveGraph:
    lvl = _Level(g, cfg or AgentConfig())
    edges = {node: lvl.moves(node) for node in sorted(lvl.standable)}
    return MoveGraph(lvl.start, g.width - 1, edges)


def _trace_from_path(
    path: list[tuple[tuple[int, int], Move | None]],
    lvl: _Level,
    completed: bool,
    exhausted: bool,
) -> PlayTrace:
    x0, y0 = path[0][0]
    steps = [(x0, y0, False, 0)]
    jumps: list[int] = []
    stomps = 0
    tick = 0
    prev = (x0, y0)
    for node, move in path[1:]:
        px, py = prev
        if move.jump:
            sign = 1 if node[0] > px else -1
            span = abs(node[0] - px)
            for ox, oy in _arc_positions(span, py - node[1], move.apex):
                tick += 1
                steps.append((px + sign * ox, py + oy, True, tick))
            jumps.append(move.ticks)
            stomps += move.stomp
        else:
            for k in range(1, move.ticks + 1):
                tick += 1
                at = node if k == move.ticks else prev
                steps.append((at[0], at[1], False, tick))
        prev = node
    reached = max(n[0] for n, _ in path)
    return PlayTrace(
        steps=steps,
        jumps=jumps,
        stomp_kills=stomps,
        total_enemy_deaths=stomps,
        reached_x=reached,
        completed=completed,
        total_ticks=tick,
        width=lvl.width,
        budget_exhausted=exhausted,
        path=[n for n, _ in path],
    )


def run_agent(g: TileGrid, cfg: AgentConfig | None = None) -> PlayTrace:
    cfg = cfg or AgentConfig()
    lvl = _Level(g, cfg)
    goal_x = g.width - 1
    if lvl.start is None:
        return PlayTrace([], [], 0, 0, 0, False, 0, g.width)

    per_tile = min(cfg.ticks_per_tile_walk, (2 + cfg.max_jump_span) / cfg.max_jump_span)
    start = lvl.start
    came: dict[tuple[int, int], tuple[tuple[int, int], Move] | None] = {start: None}
    best_g = {start: 0}
    counter = 0
    heap = [((goal_x - start[0]) * per_tile, -start[0], start[1], counter, start)]
    closed: set[tuple[int, int]] = set()
    best = start
    expansions = 0
    found = None
    exhausted = False

    while heap:
        _, _, _, _, node = heapq.heappop(heap)
        if node in closed:
            continue
        gcost = best_g[node]
        if node[0] == goal_x:
            found = node
            break
        if expansions >= cfg.max_expansions:
            exhausted = True
            break
        closed.add(node)
        expansions += 1
        if node[0] > best[0] or (node[0] == best[0] and gcost < best_g[best]):
            best = node
        for move in lvl.moves(node):
            nxt = move.target
            if nxt in closed:
                continue
            ng = gcost + move.ticks
            if ng < best_g.get(nxt, math.inf):
                best_g[nxt] = ng
                came[nxt] = (node, move)
                counter += 1
                f = ng + (goal_x - nxt[0]) * per_tile
                heapq.heappush(heap, (f, -nxt[0], nxt[1], counter, nxt))

    end = found if found is not None else best
    path: list[tuple[tuple[int, int], Move | None]] = []
    cur = end
    while True:
        link = came[cur]
        if link is None:
            path.append((cur, None))
            break
        prev, move = link
        path.append((cur, move))
        cur = prev
    path.reverse()
    return _trace_from_path(path, lvl, found is not None, exhausted)


def extract_agent_metrics(
    t: PlayTrace, g: TileGrid | None = None, cfg: AgentConfig | None = None
) -> AgentMetrics:
    cfg = cfg or AgentConfig()
    width = g.width if g is not None else t.width
    if width > 1:
        playability = min(max(t.reached_x / (width - 1), 0.0), 1.0)
    else:
        playability = 1.0 if t.completed else 0.0
    if t.completed:
        playability = 1.0

    degenerate = t.total_ticks == 0
    ticks = t.total_ticks if not degenerate else 1
    time_taken = ticks / cfg.ticks_per_second
    if degenerate:
        jump_entropy = 0.0
        on_ground = 1.0
        ys = [s[1] for s in t.steps[:1]]
    else:
        jump_entropy = len(t.jumps) / t.total_ticks
        ground = sum(1 for s in t.steps[1:] if not s[2])
        on_ground = ground / t.total_ticks
        ys = [s[1] for s in t.steps[1:]]
    return AgentMetrics(
        playability=playability,
        jump_count=len(t.jumps),
        jump_entropy=jump_entropy,
        speed=playability / time_taken,
        time_taken=time_taken,
        total_enemy_deaths=t.total_enemy_deaths,
        kills_by_stomp=t.stomp_kills,
        max_jump_air_time=max(t.jumps, default=0),
        on_ground_ratio=on_ground,
        average_y=sum(ys) / len(ys) if ys else 0.0,
        degenerate=degenerate,
    )

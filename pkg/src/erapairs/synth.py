"""Seeded synthetic platformer corpora.

Each level is a ground strip whose height performs a bounded random walk,
broken by gaps and decorated with enemies, pipes and rewards. Level ``i`` of
a generator draws from its own stream seeded by ``(seed, i)``, so a level
does not depend on how many others are generated alongside it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .levels import TileGrid, default_classification, parse_level

SAFE_COLUMNS = 3


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    width: int = 150
    height: int = 16
    level_count: int = 100
    gap_prob: float = 0.04
    max_gap_width: int = 4
    enemy_prob: float = 0.05
    pipe_prob: float = 0.02
    reward_prob: float = 0.05
    height_walk_step: int = 1
    generator_label: str = "synth"

    def __post_init__(self) -> None:
        for name in ("gap_prob", "enemy_prob", "pipe_prob", "reward_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.width < 1 or self.height < 1:
            raise ValueError("level dimensions must be positive")
        if self.height < 6:
            raise ValueError("levels need at least 6 rows for ground and headroom")
        if self.level_count < 0 or self.max_gap_width < 1 or self.height_walk_step < 0:
            raise ValueError("level_count, max_gap_width and height_walk_step out of range")
        if not self.generator_label or "/" in self.generator_label:
            raise ValueError(f"invalid generator label {self.generator_label!r}")

    @classmethod
    def from_mapping(cls, values: dict[str, str], **overrides) -> SynthParams:
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                raise ValueError(f"unknown synth option {key!r}")
            t = types[key]
            kwargs[key] = raw if t == "str" else float(raw) if t == "float" else int(raw)
        kwargs.update(overrides)
        return cls(**kwargs)

    def as_dict(self) -> dict:
        return asdict(self)


def _level_text(p: SynthParams, rng: np.random.Generator) -> str:
    w, h = p.width, p.height
    rows = [["-"] * w for _ in range(h)]
    lo, hi = 1, h - 6
    ground = min(2, hi)
    heights = []
    gap_left = 0
    for x in range(w):
        safe = x < SAFE_COLUMNS or x >= w - SAFE_COLUMNS
        if p.height_walk_step and not safe and rng.random() < 0.25:
            step = int(rng.integers(1, p.height_walk_step + 1)) * (1 if rng.random() < 0.5 else -1)
            ground = min(max(ground + step, lo), hi)
        if gap_left == 0 and not safe and rng.random() < p.gap_prob:
            gap_left = int(rng.integers(1, p.max_gap_width + 1))
        if gap_left and not safe:
            heights.append(0)
            gap_left -= 1
        else:
            heights.append(ground)
            gap_left = 0

    for x, gh in enumerate(heights):
        for y in range(h - gh, h):
            rows[y][x] = "X"

    x = 0
    while x < w:
        gh = heights[x]
        safe = x < SAFE_COLUMNS or x >= w - SAFE_COLUMNS
        surface = h - gh - 1
        if gh and not safe:
            if (
                x + 1 < w - SAFE_COLUMNS
                and heights[x + 1] == gh
                and rng.random() < p.pipe_prob
            ):
                rows[surface - 1][x : x + 2] = ["<", ">"]
                rows[surface][x : x + 2] = ["[", "]"]
                x += 2
                continue
            if rng.random() < p.enemy_prob:
                rows[surface][x] = "g"
        if rng.random() < p.reward_prob:
            base = surface if gh else h - 3
            y = base - int(rng.integers(2, 4))
            rows[y][x] = "o" if rng.random() < 0.7 else "?"
        x += 1
    return "\n".join("".join(r) for r in rows) + "\n"


def generate_level(p: SynthParams, index: int) -> TileGrid:
    rng = np.random.default_rng([p.seed, index])
    text = _level_text(p, rng)
    return parse_level(text, default_classification(), f"{p.generator_label}_{index:04d}", p.generator_label)


def generate_corpus(p: SynthParams) -> list[TileGrid]:
    return [generate_level(p, i) for i in range(p.level_count)]


def generate_ensemble(param_sets) -> list[TileGrid]:
    param_sets = list(param_sets)
    if not param_sets:
        raise ValueError("ensemble needs at least one parameter set")
    labels = [p.generator_label for p in param_sets]
    dupes = sorted({l for l in labels if labels.count(l) > 1})
    if dupes:
        raise ValueError(f"duplicate generator labels: {dupes}")
    out: list[TileGrid] = []
    for p in param_sets:
        out.extend(generate_corpus(p))
    return out


# Nine contrasting regimes plus a small "original" set, shaped like a
# 9 x 1000 + 14 benchmark corpus.
_BENCHMARK_REGIMES = [
    dict(gap_prob=0.00, enemy_prob=0.02, pipe_prob=0.01, reward_prob=0.02, height_walk_step=0),
    dict(gap_prob=0.02, enemy_prob=0.05, pipe_prob=0.03, reward_prob=0.05, height_walk_step=1),
    dict(gap_prob=0.06, enemy_prob=0.03, pipe_prob=0.01, reward_prob=0.10, height_walk_step=1),
    dict(gap_prob=0.10, enemy_prob=0.08, pipe_prob=0.02, reward_prob=0.03, height_walk_step=2, max_gap_width=5),
    dict(gap_prob=0.03, enemy_prob=0.15, pipe_prob=0.00, reward_prob=0.08, height_walk_step=1),
    dict(gap_prob=0.15, enemy_prob=0.02, pipe_prob=0.05, reward_prob=0.01, height_walk_step=2, max_gap_width=6),
    dict(gap_prob=0.01, enemy_prob=0.01, pipe_prob=0.08, reward_prob=0.15, height_walk_step=0),
    dict(gap_prob=0.08, enemy_prob=0.10, pipe_prob=0.04, reward_prob=0.06, height_walk_step=3, max_gap_width=7),
    dict(gap_prob=0.05, enemy_prob=0.05, pipe_prob=0.02, reward_prob=0.05, height_walk_step=2, width=200),
]


def benchmark_params(seed: int = 0, per_generator: int = 1000, originals: int = 14) -> list[SynthParams]:
    base = SynthParams(seed=seed)
    out = [
        replace(base, seed=seed * 100 + i, level_count=per_generator, generator_label=f"gen{i + 1}", **kw)
        for i, kw in enumerate(_BENCHMARK_REGIMES)
    ]
    if originals:
        out.append(replace(base, seed=seed * 100 + 99, level_count=originals, generator_label="original"))
    return out

"""Self-contained SVG renderings of ERA projections.

Three views of a metric pair: mean-fitness heatmap, log-count heatmap, and
a per-generator scatter overlay. Output is plain SVG 1.1 text with no
external references, and is byte-identical for identical input.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .stats import GridHistogram, MetricTable, bin_pair

MODES = ("fitness_heatmap", "count_heatmap", "generator_overlay")

PALETTES = {
    "viridis": ["#440154", "#482878", "#3e4a89", "#31688e", "#26828e", "#1f9e89",
                "#35b779", "#6ece58", "#b5de2b", "#fde725"],
    "heat": ["#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a",
             "#e31a1c", "#bd0026", "#800026"],
}

EMPTY_CELL = "#d9d9d9"

GENERATOR_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]

JITTER = 0.005

_MARGIN_LEFT = 80
_MARGIN_RIGHT = 170
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 60


@dataclass(frozen=True)
class PlotSpec:
    pair: tuple[str, str]
    mode: str = "fitness_heatmap"
    resolution: int = 20
    width_px: int = 640
    height_px: int = 480
    palette: str = "viridis"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown plot mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.resolution < 1:
            raise ValueError("resolution must be at least 1")
        if self.width_px < 100 or self.height_px < 100:
            raise ValueError("plot dimensions must be at least 100 px")
        if self.palette not in PALETTES:
            raise ValueError(f"unknown palette {self.palette!r}")


def _hex(c: str) -> tuple[int, int, int]:
    return int(c[1:3], 16), int(c[3:5], 16), int(c[5:7], 16)


def ramp(palette: str, t: float) -> str:
    """Color at position ``t`` in [0, 1]; t = 1 gives the last stop exactly."""
    stops = PALETTES[palette]
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(stops) - 1)
    i = min(int(pos), len(stops) - 2)
    f = pos - i
    a, b = _hex(stops[i]), _hex(stops[i + 1])
    rgb = [round(x + (y - x) * f) for x, y in zip(a, b)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def generator_color(i: int) -> str:
    if i < len(GENERATOR_COLORS):
        return GENERATOR_COLORS[i]
    hue = (i * 0.618033988749895) % 1.0
    r, g, b = (round(255 * (0.5 + 0.4 * math.cos(2 * math.pi * (hue + k / 3)))) for k in range(3))
    return f"#{r:02x}{g:02x}{b:02x}"


def _n(v: float) -> str:
    return f"{v:.2f}"


def _num_label(v: float) -> str:
    return format(v, ".4g")


class _Canvas:
    def __init__(self, spec: PlotSpec, title: str):
        self.spec = spec
        self.parts: list[str] = []
        self.x0 = _MARGIN_LEFT
        self.y0 = _MARGIN_TOP
        self.w = spec.width_px - _MARGIN_LEFT - _MARGIN_RIGHT
        self.h = spec.height_px - _MARGIN_TOP - _MARGIN_BOTTOM
        if self.w < 20 or self.h < 20:
            # narrow canvases keep a minimal plot area
            self.w = max(self.w, 20)
            self.h = max(self.h, 20)
        self.title = title

    def add(self, s: str) -> None:
        self.parts.append(s)

    def text(self, x: float, y: float, s: str, anchor: str = "start", cls: str = "", extra: str = "") -> None:
        c = f" class={quoteattr(cls)}" if cls else ""
        self.add(
            f'<text x="{_n(x)}" y="{_n(y)}" text-anchor="{anchor}"{c}{extra}>{escape(s)}</text>'
        )

    def axes(self, m1: str, m2: str, x_range, y_range) -> None:
        x0, y0, w, h = self.x0, self.y0, self.w, self.h
        self.add(
            f'<rect class="frame" x="{_n(x0)}" y="{_n(y0)}" width="{_n(w)}" height="{_n(h)}" '
            'fill="none" stroke="#333333" stroke-width="1"/>'
        )
        self.text(x0, y0 + h + 18, _num_label(x_range[0]), "start", "tick")
        self.text(x0 + w, y0 + h + 18, _num_label(x_range[1]), "end", "tick")
        self.text(x0 - 6, y0 + h, _num_label(y_range[0]), "end", "tick")
        self.text(x0 - 6, y0 + 10, _num_label(y_range[1]), "end", "tick")
        self.text(x0 + w / 2, y0 + h + 40, m1, "middle", "axis-label x-label")
        cx, cy = x0 - 50, y0 + h / 2
        self.text(cx, cy, m2, "middle", "axis-label y-label", f' transform="rotate(-90 {_n(cx)} {_n(cy)})"')
        self.text(x0 + w / 2, 24, self.title, "middle", "title")

    def render(self) -> str:
        s = self.spec
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s.width_px}" '
            f'height="{s.height_px}" viewBox="0 0 {s.width_px} {s.height_px}" '
            'font-family="sans-serif" font-size="12">\n'
            f'<rect class="background" x="0" y="0" width="{s.width_px}" height="{s.height_px}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _heatmap(table: MetricTable, spec: PlotSpec, hist: GridHistogram, canvas: _Canvas) -> None:
    res = spec.resolution
    cw, ch = canvas.w / res, canvas.h / res
    if spec.mode == "fitness_heatmap":
        if table.fitness is None:
            raise ValueError("fitness heatmap needs a fitness column")
        values = hist.mean_fitness()
        scale = lambda v: v  # noqa: E731 - fitness already in [0, 1]
        legend = ("mean fitness", "0", "1")
    else:
        top = math.log1p(int(hist.counts.max()))
        values = np.where(hist.counts > 0, np.log1p(hist.counts), np.nan)
        scale = lambda v: v / top if top > 0 else 1.0  # noqa: E731
        legend = ("levels (log scale)", "1", str(int(hist.counts.max())))
    canvas.add('<g class="cells">')
    for ix in range(res):
        for iy in range(res):
            x = canvas.x0 + ix * cw
            y = canvas.y0 + canvas.h - (iy + 1) * ch
            count = int(hist.counts[ix, iy])
            if count == 0:
                fill, cls, tip = EMPTY_CELL, "cell empty", "empty"
            else:
                v = float(values[ix, iy])
                fill = ramp(spec.palette, scale(v))
                cls = "cell occupied"
                tip = f"n={count}"
                if spec.mode == "fitness_heatmap":
                    tip += f" mean fitness={v:.3f}"
            canvas.add(
                f'<rect class="{cls}" x="{_n(x)}" y="{_n(y)}" width="{_n(cw)}" height="{_n(ch)}" '
                f'fill="{fill}"><title>{escape(tip)}</title></rect>'
            )
    canvas.add("</g>")
    _colorbar(canvas, spec.palette, *legend)


def _colorbar(canvas: _Canvas, palette: str, label: str, lo: str, hi: str) -> None:
    x = canvas.x0 + canvas.w + 30
    steps = 20
    bar_h = canvas.h * 0.6
    canvas.add('<g class="colorbar">')
    for k in range(steps):
        y = canvas.y0 + bar_h - (k + 1) * bar_h / steps
        canvas.add(
            f'<rect x="{_n(x)}" y="{_n(y)}" width="16" height="{_n(bar_h / steps)}" '
            f'fill="{ramp(palette, (k + 0.5) / steps)}"/>'
        )
    canvas.text(x + 22, canvas.y0 + 10, hi)
    canvas.text(x + 22, canvas.y0 + bar_h, lo)
    canvas.text(x, canvas.y0 + bar_h + 20, label)
    canvas.add(
        f'<rect x="{_n(x)}" y="{_n(canvas.y0 + bar_h + 30)}" width="16" height="12" fill="{EMPTY_CELL}"/>'
    )
    canvas.text(x + 22, canvas.y0 + bar_h + 40, "no levels")
    canvas.add("</g>")


def _overlay(table: MetricTable, spec: PlotSpec, hist: GridHistogram, canvas: _Canvas) -> None:
    m1, m2 = spec.pair
    xs, ys = table.column(m1), table.column(m2)
    xr = (hist.x_max - hist.x_min) or 1.0
    yr = (hist.y_max - hist.y_min) or 1.0
    rng = np.random.default_rng(spec.seed)
    jx = rng.uniform(-JITTER, JITTER, len(xs)) * xr
    jy = rng.uniform(-JITTER, JITTER, len(ys)) * yr
    labels = list(dict.fromkeys(table.generator_labels))
    colors = {lab: generator_color(i) for i, lab in enumerate(labels)}

    def px(v: float) -> float:
        return canvas.x0 + (v - hist.x_min) / xr * canvas.w if hist.x_max > hist.x_min else canvas.x0 + canvas.w / 2

    def py(v: float) -> float:
        return canvas.y0 + canvas.h - ((v - hist.y_min) / yr * canvas.h if hist.y_max > hist.y_min else canvas.h / 2)

    for lab in labels:
        canvas.add(f'<g class="generator" data-generator={quoteattr(lab)} fill="{colors[lab]}" fill-opacity="0.35">')
        for i, g in enumerate(table.generator_labels):
            if g == lab:
                canvas.add(f'<circle cx="{_n(px(xs[i] + jx[i]))}" cy="{_n(py(ys[i] + jy[i]))}" r="2.5"/>')
        canvas.add("</g>")

    x = canvas.x0 + canvas.w + 20
    canvas.add('<g class="legend">')
    for k, lab in enumerate(labels):
        y = canvas.y0 + 14 * k
        canvas.add(
            f'<g class="legend-entry"><rect x="{_n(x)}" y="{_n(y)}" width="10" height="10" '
            f'fill="{colors[lab]}"/><text x="{_n(x + 16)}" y="{_n(y + 9)}">{escape(lab)}</text></g>'
        )
    canvas.add("</g>")


def render_plot_svg(table: MetricTable, spec: PlotSpec) -> str:
    if len(table) == 0:
        raise ValueError("cannot plot an empty corpus")
    m1, m2 = spec.pair
    hist = bin_pair(table, m1, m2, spec.resolution)
    titles = {
        "fitness_heatmap": "mean fitness per cell",
        "count_heatmap": "levels per cell",
        "generator_overlay": "levels by generator",
    }
    canvas = _Canvas(spec, f"{m1} vs {m2}: {titles[spec.mode]}")
    if spec.mode == "generator_overlay":
        _overlay(table, spec, hist, canvas)
    else:
        _heatmap(table, spec, hist, canvas)
    canvas.axes(m1, m2, (hist.x_min, hist.x_max), (hist.y_min, hist.y_max))
    return canvas.render()


def render_plot(table: MetricTable, spec: PlotSpec, path: str | os.PathLike[str]) -> Path:
    svg = render_plot_svg(table, spec)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return path

"""Minimal SVG line-plot emitter (linear axes, polylines, tick labels)."""
from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .two_level import BifurcationDiagram, Stability

PALETTE = {"s": "#1f4e9c", "a": "#b03a2e", "as": "#1e8449", "as1": "#1e8449", "as2": "#7d3c98"}


def _num(v: float) -> str:
    return format(v, ".6g")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(first, hi + 0.5 * step, step) if lo - 1e-12 <= t <= hi + 1e-12]


@dataclass
class LinePlot:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    width: int = 640
    height: int = 440
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    margin: int = 56
    _items: list[str] = field(default_factory=list)

    def _px(self, x: float, y: float) -> tuple[float, float]:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        return self.margin + (x - x0) / (x1 - x0) * w, self.height - self.margin - (y - y0) / (y1 - y0) * h

    def polyline(self, xs, ys, color: str = "#000", dashed: bool = False, width: float = 1.6) -> None:
        if len(xs) == 0:
            return
        pts = " ".join(f"{_num(px)},{_num(py)}" for px, py in (self._px(x, y) for x, y in zip(xs, ys)))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        if len(xs) == 1:
            px, py = self._px(xs[0], ys[0])
            self._items.append(f'<circle cx="{_num(px)}" cy="{_num(py)}" r="1.6" fill="{color}"/>')
            return
        self._items.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>'
        )

    def vline(self, x: float, color: str = "#999") -> None:
        (px, top), (_, bottom) = self._px(x, self.y_range[1]), self._px(x, self.y_range[0])
        self._items.append(
            f'<line x1="{_num(px)}" y1="{_num(top)}" x2="{_num(px)}" y2="{_num(bottom)}" '
            f'stroke="{color}" stroke-width="0.8" stroke-dasharray="2,3"/>'
        )

    def _axes(self) -> list[str]:
        m, W, H = self.margin, self.width, self.height
        out = [f'<rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}" fill="none" stroke="#333"/>']
        for t in _nice_ticks(*self.x_range):
            px, py = self._px(t, self.y_range[0])
            out.append(f'<line x1="{_num(px)}" y1="{_num(py)}" x2="{_num(px)}" y2="{_num(py + 5)}" stroke="#333"/>')
            out.append(f'<text x="{_num(px)}" y="{_num(py + 18)}" font-size="11" text-anchor="middle">{_num(t)}</text>')
        for t in _nice_ticks(*self.y_range):
            px, py = self._px(self.x_range[0], t)
            out.append(f'<line x1="{_num(px - 5)}" y1="{_num(py)}" x2="{_num(px)}" y2="{_num(py)}" stroke="#333"/>')
            out.append(f'<text x="{_num(px - 8)}" y="{_num(py + 4)}" font-size="11" text-anchor="end">{_num(t)}</text>')
        out.append(f'<text x="{W / 2}" y="{H - 14}" font-size="13" text-anchor="middle">{escape(self.x_label)}</text>')
        out.append(
            f'<text x="16" y="{H / 2}" font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 16 {H / 2})">{escape(self.y_label)}</text>'
        )
        if self.title:
            out.append(f'<text x="{W / 2}" y="24" font-size="14" text-anchor="middle">{escape(self.title)}</text>')
        return out

    def render(self) -> str:
        body = "\n".join(self._axes() + self._items)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
        )


def _series_key(p) -> tuple:
    side = 0 if p.z == 0 else (1 if p.z > 0 else -1)
    return (p.label.value, p.theta.value, side)


def diagram_svg(diagram: BifurcationDiagram, quantity: str = "z") -> str:
    """Branches of ``z`` (or ``energy``) against ``eta``; solid where stable, dashed otherwise.

    A series is split wherever its stability changes or a grid coupling is skipped,
    so folds and branch births never get bridged by a straight segment.
    """
    grid = diagram.eta_grid
    index = {e: i for i, e in enumerate(grid)}
    series: dict[tuple, list] = {}
    for p in diagram.branches:
        series.setdefault(_series_key(p), []).append(p)
    values = [getattr(p, quantity) for p in diagram.branches] or [0.0]
    lo, hi = min(values), max(values)
    pad = 0.05 * (hi - lo or 1.0)
    plot = LinePlot(
        (grid[0], grid[-1]) if grid[-1] > grid[0] else (grid[0] - 1, grid[0] + 1),
        (lo - pad, hi + pad),
        x_label="eta",
        y_label=quantity,
        title=f"sigma = {_num(diagram.sigma)}",
    )
    for key in sorted(series):
        pts = sorted(series[key], key=lambda p: p.eta)
        run: list = []
        for p in pts:
            if run and (p.stability is not run[-1].stability or index[p.eta] != index[run[-1].eta] + 1):
                _draw_run(plot, run, key[0], quantity)
                # share the junction point so a stability change leaves no gap
                run = [run[-1]] if index[p.eta] == index[run[-1].eta] + 1 else []
            run.append(p)
        _draw_run(plot, run, key[0], quantity)
    for name in ("eta_star", "eta_plus"):
        v = diagram.critical.get(name)
        if v is not None:
            for c in (-v, v):
                if plot.x_range[0] <= c <= plot.x_range[1]:
                    plot.vline(c)
    return plot.render()


def _draw_run(plot: LinePlot, run: list, label: str, quantity: str) -> None:
    if not run:
        return
    dashed = run[-1].stability is not Stability.STABLE
    plot.polyline([p.eta for p in run], [getattr(p, quantity) for p in run], PALETTE.get(label, "#000"), dashed)

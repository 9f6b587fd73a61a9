"""Minimal static SVG line plots: solid/dashed series, legend, axis labels, optional log-y."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


@dataclass
class Series:
    xs: list[float]
    ys: list[float]
    label: str
    color: str
    dashed: bool = False
    markers: bool = False


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    log_y: bool = False
    width: int = 640
    height: int = 440
    series: list[Series] = field(default_factory=list)

    def line(self, xs, ys, label="", color=None, dashed=False, markers=False):
        if color is None:
            color = PALETTE[len({s.color for s in self.series}) % len(PALETTE)]
        self.series.append(Series([float(x) for x in xs], [float(y) for y in ys],
                                  label, color, dashed, markers))
        return color

    def _ty(self, y):
        if self.log_y:
            return math.log10(y) if y > 0 else None
        return y

    def render(self) -> str:
        left, right, top, bottom = 70, 170, 40, 55
        pw, ph = self.width - left - right, self.height - top - bottom
        xs = [x for s in self.series for x in s.xs]
        ys = [self._ty(y) for s in self.series for y in s.ys]
        ys = [y for y in ys if y is not None and math.isfinite(y)]
        x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
        y0, y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad = 0.05 * (y1 - y0)
        y0, y1 = y0 - pad, y1 + pad

        def px(x):
            return left + (x - x0) / (x1 - x0) * pw

        def py(y):
            return top + (1.0 - (y - y0) / (y1 - y0)) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}" '
               'font-family="sans-serif" font-size="12">',
               f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
               f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
        for t in _ticks(x0, x1):
            out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" '
                       f'y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{px(t):.2f}" y="{top + ph + 18}" '
                       f'text-anchor="middle">{_fmt_tick(t)}</text>')
        for t in _ticks(y0, y1):
            label = _fmt_tick(10 ** t) if self.log_y else _fmt_tick(t)
            out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" '
                       'stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{label}</text>')
        for s in self.series:
            pts = [(px(x), py(ty)) for x, y in zip(s.xs, s.ys)
                   if (ty := self._ty(y)) is not None and math.isfinite(ty)]
            if not pts:
                continue
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{s.color}" '
                       f'stroke-width="1.8"{dash}/>')
            if s.markers:
                out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{s.color}"/>'
                           for a, b in pts)
        ly = top + 10
        for s in self.series:
            if not s.label:
                continue
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            lx = left + pw + 12
            out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{s.color}" '
                       f'stroke-width="1.8"{dash}/>')
            out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(s.label)}</text>')
            ly += 16
        out.append(f'<text x="{left + pw / 2}" y="{self.height - 12}" '
                   f'text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2})">{escape(self.ylabel)}</text>')
        if self.title:
            out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" '
                       f'font-size="14">{escape(self.title)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        try:
            path.write_text(self.render())
        except OSError as exc:
            raise OSError(f"cannot write SVG to {path}: {exc}") from exc
        return path


def _ticks(lo, hi, n=6):
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for m in (1, 2, 5, 10):
        if span / (step * m) <= n:
            step *= m
            break
    t = math.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-12 * span:
        out.append(round(t, 12))
        t += step
    return out


def _fmt_tick(v):
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-3):
        return f"{v:.0e}"
    return f"{v:g}"

"""A small SVG 1.1 emitter for line and scatter plots."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass
class Series:
    label: str
    points: list[tuple[float, float]]
    line: bool = True
    markers: bool = True
    # indices of points drawn with a cross instead of a dot
    crosses: tuple[int, ...] = ()


@dataclass
class Plot:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    width: int = 640
    height: int = 420


def _finite(points):
    return [(x, y) for x, y in points if math.isfinite(x) and math.isfinite(y)]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def render(plot: Plot) -> str:
    left, right, top, bottom = 70, 150, 40, 50
    w, h = plot.width, plot.height
    pw, ph = w - left - right, h - top - bottom
    pts = [p for s in plot.series for p in _finite(s.points)]
    if pts:
        xs, ys = zip(*pts)
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(plot.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1):
        y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{h - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">{escape(plot.xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(plot.ylabel)}</text>'
    )
    for k, s in enumerate(plot.series):
        color = PALETTE[k % len(PALETTE)]
        fin = _finite(s.points)
        if s.line and len(fin) > 1:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in fin)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for i, (x, y) in enumerate(s.points):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            cx, cy = sx(x), sy(y)
            if i in s.crosses:
                out.append(
                    f'<path d="M{cx - 5:.2f},{cy - 5:.2f} L{cx + 5:.2f},{cy + 5:.2f} M{cx - 5:.2f},{cy + 5:.2f} '
                    f'L{cx + 5:.2f},{cy - 5:.2f}" stroke="black" stroke-width="2"/>'
                )
            elif s.markers:
                out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" fill="{color}"/>')
        ly = top + 14 + 18 * k
        out.append(f'<line x1="{w - right + 12}" y1="{ly}" x2="{w - right + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{w - right + 38}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(path, plot: Plot) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(plot), encoding="utf-8")
    return path

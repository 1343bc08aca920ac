"""Tiny deterministic SVG line plots (axes, polylines, markers)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    markers: bool = False
    dashed: bool = False


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def line_plot(series, title="", xlabel="", ylabel="") -> str:
    finite = [(s.x[np.isfinite(s.y)], s.y[np.isfinite(s.y)]) for s in series]
    xs = np.concatenate([f[0] for f in finite]) if finite else np.array([0.0, 1.0])
    ys = np.concatenate([f[1] for f in finite]) if finite else np.array([0.0, 1.0])
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = (min(0.0, float(ys.min())), float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN_T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{MARGIN_T + ph}" x2="{px(t):.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{py(t):.2f}" x2="{MARGIN_L}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, (s, (x, y)) in enumerate(zip(series, finite)):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        dash = ' stroke-dasharray="4 3"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        if s.markers:
            out.extend(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="{color}"/>' for a, b in zip(x, y))
        ly = MARGIN_T + 16 + 16 * i
        out.append(f'<line x1="{MARGIN_L + pw - 150}" y1="{ly - 4}" x2="{MARGIN_L + pw - 130}" y2="{ly - 4}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{MARGIN_L + pw - 125}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

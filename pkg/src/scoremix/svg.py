"""Minimal self-contained SVG line and band charts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass
class Series:
    """A curve sampled at ``theta``; ``left`` holds limits from the left for jumps."""

    name: str
    theta: np.ndarray
    value: np.ndarray
    left: Optional[np.ndarray] = None


@dataclass
class Band:
    theta: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def _path_points(s: Series) -> tuple[np.ndarray, np.ndarray]:
    # insert the left limit before each value so jumps draw as vertical segments
    if s.left is None:
        return np.asarray(s.theta, float), np.asarray(s.value, float)
    t = np.repeat(np.asarray(s.theta, float), 2)
    v = np.empty(t.size)
    v[0::2] = s.left
    v[1::2] = s.value
    return t, v


def render(series: Sequence[Series], title: str, xlabel: str, ylabel: str, band: Optional[Band] = None) -> str:
    pts = [_path_points(s) for s in series]
    xs = np.concatenate([p[0] for p in pts] + ([band.theta] if band else []))
    ys = np.concatenate([p[1] for p in pts] + ([band.lower, band.upper] if band else []) + [np.zeros(1)])
    xs, ys = xs[np.isfinite(xs)], ys[np.isfinite(ys)]
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(t):
        return MARGIN + (np.asarray(t) - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v):
        return HEIGHT - MARGIN - (np.asarray(v) - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    def coords(t, v):
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx(t), sy(v)))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    if band is not None:
        poly = coords(np.concatenate([band.theta, band.theta[::-1]]), np.concatenate([band.upper, band.lower[::-1]]))
        out.append(f'<polygon points="{poly}" fill="#999999" fill-opacity="0.35" stroke="none"/>')
    # axes and zero line
    out.append(
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    if y0 < 0 < y1:
        zy = float(sy(0.0))
        out.append(f'<line x1="{MARGIN}" y1="{zy:.2f}" x2="{WIDTH - MARGIN}" y2="{zy:.2f}" stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    for frac in (0.0, 0.5, 1.0):
        tx, ty = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{float(sx(tx)):.2f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{tx:.3g}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{float(sy(ty)) + 4:.2f}" text-anchor="end">{ty:.3g}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>'
    )
    for k, (s, (t, v)) in enumerate(zip(series, pts)):
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline points="{coords(t, v)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN + 14 * k
        out.append(f'<text x="{WIDTH - MARGIN}" y="{ly}" text-anchor="end" fill="{color}">{escape(s.name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

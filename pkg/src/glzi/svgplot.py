"""Minimal dependency-free SVG renderings of scan CSV data.

Data files are the contract; these plots are a convenience for eyeballing
fringes and heatmaps without a plotting stack.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

_W, _H = 640, 420
_MARGIN = 50


def _scale(values: Sequence[float], lo: float, hi: float, out_lo: float,
           out_hi: float) -> list[float]:
    span = (hi - lo) or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def line_plot_svg(path: Path, x: Sequence[float], series: dict[str, Sequence[float]],
                  x_label: str, y_label: str, title: str) -> None:
    """Write a single-axis line plot with one polyline per named series."""
    xs = list(x)
    all_y = [v for ys in series.values() for v in ys if not math.isnan(v)]
    y_lo, y_hi = (min(all_y), max(all_y)) if all_y else (0.0, 1.0)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    px = _scale(xs, min(xs), max(xs), _MARGIN, _W - _MARGIN)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_W // 2}" y="{_H - 10}" text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="15" y="{_H // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {_H // 2})">{y_label}</text>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
        f'height="{_H - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    for i, (name, ys) in enumerate(series.items()):
        py = _scale(list(ys), y_lo, y_hi, _H - _MARGIN, _MARGIN)
        pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, py))
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MARGIN + 4}" y="{_MARGIN + 14 * (i + 1)}" '
                     f'font-size="10" fill="{color}">{name}</text>')
    parts.append(f'<text x="{_MARGIN}" y="{_H - _MARGIN + 14}" font-size="10">{min(xs):.3g}</text>')
    parts.append(f'<text x="{_W - _MARGIN}" y="{_H - _MARGIN + 14}" font-size="10" '
                 f'text-anchor="end">{max(xs):.3g}</text>')
    parts.append(f'<text x="{_MARGIN - 4}" y="{_H - _MARGIN}" font-size="10" '
                 f'text-anchor="end">{y_lo:.3g}</text>')
    parts.append(f'<text x="{_MARGIN - 4}" y="{_MARGIN + 4}" font-size="10" '
                 f'text-anchor="end">{y_hi:.3g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts), encoding="utf-8")


def _color(v: float) -> str:
    """Blue-white-red map on [0, 1]."""
    v = min(max(v, 0.0), 1.0)
    if v < 0.5:
        t = v / 0.5
        r, g, b = int(255 * t), int(255 * t), 255
    else:
        t = (v - 0.5) / 0.5
        r, g, b = 255, int(255 * (1 - t)), int(255 * (1 - t))
    return f"rgb({r},{g},{b})"


def heatmap_svg(path: Path, x: Sequence[float], y: Sequence[float],
                values: Sequence[Sequence[float]], x_label: str, y_label: str,
                title: str) -> None:
    """Write a rect-grid heatmap; values indexed [ix][iy], clipped to [0, 1]."""
    nx, ny = len(x), len(y)
    cw = (_W - 2 * _MARGIN) / nx
    ch = (_H - 2 * _MARGIN) / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_W // 2}" y="{_H - 10}" text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="15" y="{_H // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {_H // 2})">{y_label}</text>',
    ]
    for ix in range(nx):
        for iy in range(ny):
            cx = _MARGIN + ix * cw
            cy = _H - _MARGIN - (iy + 1) * ch
            parts.append(f'<rect x="{cx:.1f}" y="{cy:.1f}" width="{cw + 0.5:.1f}" '
                         f'height="{ch + 0.5:.1f}" fill="{_color(values[ix][iy])}"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts), encoding="utf-8")

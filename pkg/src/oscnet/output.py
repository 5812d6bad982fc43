"""CSV and SVG writers.

CSV numbers use Python's shortest round-trip ``repr`` so identical runs give
byte-identical files.
"""
from __future__ import annotations

import csv
from html import escape
from typing import Iterable, Sequence

import numpy as np

__all__ = ["write_csv", "format_number", "svg_polyline", "write_svg"]

SPECTRUM_HEADER = ("index", "eigenvalue")
MSF_HEADER = ("kappa", "alpha", "max_multiplier", "max_exponent")
SYNC_HEADER = ("t", "error")


def trajectory_header(n_nodes: int) -> tuple[str, ...]:
    cols = ["t"]
    for i in range(1, n_nodes + 1):
        cols += [f"x{i}_1", f"x{i}_2"]
    return tuple(cols)


def format_number(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write ``rows`` under ``header``; returns the row count."""
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} columns, header has {len(header)}")
            w.writerow([format_number(v) for v in row])
            count += 1
    return count


def svg_polyline(x, y, *, title: str = "", xlabel: str = "", ylabel: str = "",
                 width: int = 640, height: int = 400, logy: bool = False) -> str:
    """Standalone SVG with axes, tick labels at the extremes and one polyline."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if logy:
        y = np.log10(np.maximum(y, 1e-300))
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    px = left + (x - x0) / (x1 - x0) * pw
    py = top + (1 - (y - y0) / (y1 - y0)) * ph
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    ylab = f"log10 {ylabel}" if logy else ylabel
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{x0:.4g}</text>',
        f'<text x="{left + pw}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{x1:.4g}</text>',
        f'<text x="{left - 6}" y="{top + ph}" font-size="11" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{left - 6}" y="{top + 4}" font-size="11" text-anchor="end">{y1:.4g}</text>',
        f'<text x="{left + pw / 2:.0f}" y="{height - 10}" font-size="13" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{top + ph / 2:.0f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.0f})">{escape(ylab)}</text>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{points}"/>',
        "</svg>",
        "",
    ])


def write_svg(path, x, y, **kwargs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg_polyline(x, y, **kwargs))

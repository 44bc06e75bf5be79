"""Minimal self-contained SVG log-log plots (no plotting dependency)."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["loglog_svg", "line_svg"]

_WIDTH, _HEIGHT = 640, 480
_MARGIN = 64
_COLORS = ("#1f6fb2", "#d1495b", "#3a7d44", "#8338ec")


def _decades(lo: float, hi: float):
    start = math.floor(math.log10(lo))
    stop = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(start, stop + 1)]


def line_svg(path, series, title="", xlabel="", ylabel="") -> None:
    """Write a linear-axes polyline plot (used for density curves)."""
    xs = np.concatenate([np.asarray(s["x"], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(min(ys.min(), 0.0)), float(ys.max())
    x_pad = 0.02 * (x_hi - x_lo + 1e-12)
    y_pad = 0.05 * (y_hi - y_lo + 1e-12)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x):
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def py(y):
        return _HEIGHT - _MARGIN - (y - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT / 2})">{ylabel}</text>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
        f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    if y_lo < 0.0 < y_hi:
        parts.append(f'<line x1="{_MARGIN}" y1="{py(0):.2f}" x2="{_WIDTH - _MARGIN}" '
                     f'y2="{py(0):.2f}" stroke="#bbb"/>')
    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        order = np.argsort(np.asarray(s["x"], dtype=float))
        x = np.asarray(s["x"], dtype=float)[order]
        y = np.asarray(s["y"], dtype=float)[order]
        points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}"/>')
        if s.get("label"):
            parts.append(f'<text x="{_WIDTH - _MARGIN - 4}" y="{_MARGIN + 16 + 14 * i}" '
                         f'text-anchor="end" font-size="11" fill="{color}">{s["label"]}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def loglog_svg(path, series, lines=(), title="", xlabel="", ylabel="") -> None:
    """Write a log-log scatter plot with optional straight reference lines.

    ``series`` is a list of {"x": .., "y": .., "label": ..} point sets with
    positive coordinates; ``lines`` a list of {"slope", "intercept",
    "label"} entries in log10 space (log10 y = slope * log10 x + intercept).
    """
    xs = np.concatenate([np.asarray(s["x"], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    mask = (xs > 0) & (ys > 0)
    if not np.any(mask):
        raise ValueError("log-log plot needs positive data")
    lx_lo, lx_hi = np.log10(xs[mask].min()), np.log10(xs[mask].max())
    ly_lo, ly_hi = np.log10(ys[mask].min()), np.log10(ys[mask].max())
    lx_lo, lx_hi = lx_lo - 0.05 * (lx_hi - lx_lo + 1e-9) - 1e-9, lx_hi + 0.05 * (lx_hi - lx_lo + 1e-9) + 1e-9
    ly_lo, ly_hi = ly_lo - 0.05 * (ly_hi - ly_lo + 1e-9) - 1e-9, ly_hi + 0.05 * (ly_hi - ly_lo + 1e-9) + 1e-9

    def px(lx):
        return _MARGIN + (lx - lx_lo) / (lx_hi - lx_lo) * (_WIDTH - 2 * _MARGIN)

    def py(ly):
        return _HEIGHT - _MARGIN - (ly - ly_lo) / (ly_hi - ly_lo) * (_HEIGHT - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT / 2})">{ylabel}</text>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
        f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    for tick in _decades(10 ** lx_lo, 10 ** lx_hi):
        lx = math.log10(tick)
        if lx_lo <= lx <= lx_hi:
            parts.append(f'<line x1="{px(lx):.2f}" y1="{_HEIGHT - _MARGIN}" '
                         f'x2="{px(lx):.2f}" y2="{_HEIGHT - _MARGIN + 6}" stroke="black"/>')
            parts.append(f'<text x="{px(lx):.2f}" y="{_HEIGHT - _MARGIN + 20}" '
                         f'text-anchor="middle" font-size="10">{tick:g}</text>')
    for tick in _decades(10 ** ly_lo, 10 ** ly_hi):
        ly = math.log10(tick)
        if ly_lo <= ly <= ly_hi:
            parts.append(f'<line x1="{_MARGIN - 6}" y1="{py(ly):.2f}" '
                         f'x2="{_MARGIN}" y2="{py(ly):.2f}" stroke="black"/>')
            parts.append(f'<text x="{_MARGIN - 9}" y="{py(ly):.2f}" '
                         f'text-anchor="end" font-size="10">{tick:g}</text>')
    for i, line in enumerate(lines):
        y1 = line["slope"] * lx_lo + line["intercept"]
        y2 = line["slope"] * lx_hi + line["intercept"]
        parts.append(f'<line x1="{px(lx_lo):.2f}" y1="{py(y1):.2f}" x2="{px(lx_hi):.2f}" '
                     f'y2="{py(y2):.2f}" stroke="#555" stroke-dasharray="6 3"/>')
        if line.get("label"):
            parts.append(f'<text x="{px(lx_lo) + 8:.2f}" y="{py(y1) - 6:.2f}" '
                         f'font-size="10" fill="#555">{line["label"]}</text>')
    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        for xi, yi in zip(x, y):
            if xi > 0 and yi > 0:
                parts.append(f'<circle cx="{px(math.log10(xi)):.2f}" '
                             f'cy="{py(math.log10(yi)):.2f}" r="3" fill="{color}"/>')
        if s.get("label"):
            parts.append(f'<text x="{_WIDTH - _MARGIN - 4}" y="{_MARGIN + 16 + 14 * i}" '
                         f'text-anchor="end" font-size="11" fill="{color}">{s["label"]}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")

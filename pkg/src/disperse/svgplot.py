"""Minimal hand-rolled SVG plots (no plotting dependency).

Two plot kinds cover the CLI's needs: a complex-plane scatter of taps,
centroids, and soft-assigned taps, and a line plot of Q versus a swept
parameter with an optional second axis for RMPS.
"""

from __future__ import annotations

import math

_W, _H = 640, 480
_MARGIN = 56


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def _axis_ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * abs(step):
        ticks.append(round(t, 12))
        t += step
    return ticks


def _header(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{title}</text>',
    ]


def scatter_svg(points, centroids, soft_mask, title="tap clusters") -> str:
    """Complex-plane scatter: taps (soft ones highlighted) and centroids."""
    xs = [p.real for p in points] + [c.real for c in centroids]
    ys = [p.imag for p in points] + [c.imag for c in centroids]
    pad = 0.1 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-12)
    lo_x, hi_x = min(xs) - pad, max(xs) + pad
    lo_y, hi_y = min(ys) - pad, max(ys) + pad
    parts = _header(title)
    px = _scale([p.real for p in points], lo_x, hi_x, _MARGIN, _W - _MARGIN)
    py = _scale([p.imag for p in points], lo_y, hi_y, _H - _MARGIN, _MARGIN)
    for x, y, soft in zip(px, py, soft_mask):
        color = "#1f77b4" if soft else "#999999"
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
    cx = _scale([c.real for c in centroids], lo_x, hi_x, _MARGIN, _W - _MARGIN)
    cy = _scale([c.imag for c in centroids], lo_y, hi_y, _H - _MARGIN, _MARGIN)
    for x, y in zip(cx, cy):
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="none" '
            f'stroke="#d62728" stroke-width="2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def line_plot_svg(
    x, y_left, left_label, y_right=None, right_label="", title="sweep"
) -> str:
    """Line plot with a left axis and an optional right (dual) axis."""
    lo_x, hi_x = min(x), max(x)
    lo_l, hi_l = min(y_left), max(y_left)
    pad_l = 0.05 * (hi_l - lo_l or 1.0)
    lo_l, hi_l = lo_l - pad_l, hi_l + pad_l
    parts = _header(title)
    px = _scale(x, lo_x, hi_x, _MARGIN, _W - _MARGIN)

    def polyline(values, lo, hi, color):
        py = _scale(values, lo, hi, _H - _MARGIN, _MARGIN)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>'

    # frame and ticks
    parts.append(
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
        f'height="{_H - 2 * _MARGIN}" fill="none" stroke="black"/>'
    )
    for t in _axis_ticks(lo_x, hi_x):
        (tx,) = _scale([t], lo_x, hi_x, _MARGIN, _W - _MARGIN)
        parts.append(
            f'<text x="{tx:.1f}" y="{_H - _MARGIN + 18}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{t:g}</text>'
        )
    for t in _axis_ticks(lo_l, hi_l):
        (ty,) = _scale([t], lo_l, hi_l, _H - _MARGIN, _MARGIN)
        parts.append(
            f'<text x="{_MARGIN - 6}" y="{ty:.1f}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif" fill="#1f77b4">{t:g}</text>'
        )
    parts.append(
        f'<text x="14" y="{_H / 2}" font-size="12" font-family="sans-serif" '
        f'fill="#1f77b4" transform="rotate(-90 14 {_H / 2})" '
        f'text-anchor="middle">{left_label}</text>'
    )
    parts.append(polyline(y_left, lo_l, hi_l, "#1f77b4"))

    if y_right is not None:
        lo_r, hi_r = min(y_right), max(y_right)
        pad_r = 0.05 * (hi_r - lo_r or 1.0)
        lo_r, hi_r = lo_r - pad_r, hi_r + pad_r
        for t in _axis_ticks(lo_r, hi_r):
            (ty,) = _scale([t], lo_r, hi_r, _H - _MARGIN, _MARGIN)
            parts.append(
                f'<text x="{_W - _MARGIN + 6}" y="{ty:.1f}" text-anchor="start" '
                f'font-size="11" font-family="sans-serif" fill="#d62728">{t:g}</text>'
            )
        parts.append(
            f'<text x="{_W - 14}" y="{_H / 2}" font-size="12" '
            f'font-family="sans-serif" fill="#d62728" '
            f'transform="rotate(90 {_W - 14} {_H / 2})" '
            f'text-anchor="middle">{right_label}</text>'
        )
        parts.append(polyline(y_right, lo_r, hi_r, "#d62728"))

    parts.append("</svg>")
    return "\n".join(parts)

"""Minimal SVG line plots: polylines, axes, tick labels."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def line_plot(path, series, *, title="", xlabel="", ylabel="", logy=False, logx=False) -> None:
    """Write ``series`` (a list of ``(label, x, y)``) as an SVG file.

    Non-finite points and, on log axes, nonpositive points are dropped.
    """
    prepared = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logy:
            ok &= y > 0
        if logx:
            ok &= x > 0
        x, y = x[ok], y[ok]
        if logx:
            x = np.log10(x)
        if logy:
            y = np.log10(y)
        prepared.append((label, x, y))

    xs = np.concatenate([p[1] for p in prepared]) if prepared else np.array([0.0])
    ys = np.concatenate([p[2] for p in prepared]) if prepared else np.array([0.0])
    if xs.size == 0:
        xs = ys = np.array([0.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        return TOP + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        lab = f"1e{v:.1f}" if logx else f"{v:.4g}"
        out.append(f'<line x1="{px(v):.2f}" y1="{TOP + ph}" x2="{px(v):.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{TOP + ph + 18}" text-anchor="middle">{lab}</text>')
    for v in _ticks(y0, y1):
        lab = f"1e{v:.1f}" if logy else f"{v:.4g}"
        out.append(f'<line x1="{LEFT - 5}" y1="{py(v):.2f}" x2="{LEFT}" y2="{py(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py(v) + 4:.2f}" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{H - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2})">{escape(ylabel)}</text>'
    )
    for idx, (label, x, y) in enumerate(prepared):
        color = _COLORS[idx % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        if pts:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 14 + 16 * idx
        out.append(f'<text x="{LEFT + pw - 4}" y="{ly}" text-anchor="end" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def fmt_float(v) -> str:
    """Shortest round-trip decimal for a float (empty for None)."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)

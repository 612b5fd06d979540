"""Minimal deterministic SVG line plots (two stacked axes)."""
from __future__ import annotations

import numpy as np

WIDTH, HEIGHT = 800, 520
MARGIN_L, MARGIN_R, MARGIN_T, GAP = 70, 20, 30, 50
COLORS = ("#1f77b4", "#d62728")
MAX_POINTS = 2000


def _decimate(x, y):
    if len(x) <= MAX_POINTS:
        return x, y
    idx = np.linspace(0, len(x) - 1, MAX_POINTS).round().astype(int)
    return x[idx], y[idx]


def _polyline(x, y, x0, x1, y0, y1, box, color, dash=False):
    left, top, w, h = box
    sx = w / (x1 - x0) if x1 > x0 else 1.0
    sy = h / (y1 - y0) if y1 > y0 else 1.0
    pts = " ".join(f"{left + (a - x0) * sx:.2f},{top + h - (b - y0) * sy:.2f}" for a, b in zip(x, y))
    extra = ' stroke-dasharray="6,3"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.2"{extra} points="{pts}"/>'


def two_axis_plot(t, panels, title="") -> str:
    """``panels`` is a list of two ``(label, [(name, values), ...])`` entries."""
    t = np.asarray(t, dtype=float)
    plot_h = (HEIGHT - MARGIN_T - 2 * GAP) / 2
    w = WIDTH - MARGIN_L - MARGIN_R
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>')
    x0, x1 = (float(t[0]), float(t[-1])) if len(t) else (0.0, 1.0)
    for k, (label, series) in enumerate(panels):
        top = MARGIN_T + k * (plot_h + GAP)
        box = (MARGIN_L, top, w, plot_h)
        vals = np.concatenate([np.asarray(v, dtype=float) for _, v in series]) if series else np.zeros(1)
        y0, y1 = float(np.min(vals)), float(np.max(vals))
        if y1 - y0 < 1e-12:
            y0, y1 = y0 - 1.0, y1 + 1.0
        pad = 0.05 * (y1 - y0)
        y0, y1 = y0 - pad, y1 + pad
        out.append(f'<rect x="{MARGIN_L}" y="{top:.2f}" width="{w}" height="{plot_h:.2f}" fill="none" stroke="black"/>')
        out.append(f'<text x="15" y="{top + plot_h / 2:.2f}" font-family="sans-serif" font-size="12">{label}</text>')
        out.append(f'<text x="{MARGIN_L - 5}" y="{top + 10:.2f}" text-anchor="end" font-family="sans-serif" font-size="10">{y1:.4g}</text>')
        out.append(f'<text x="{MARGIN_L - 5}" y="{top + plot_h:.2f}" text-anchor="end" font-family="sans-serif" font-size="10">{y0:.4g}</text>')
        for j, (name, v) in enumerate(series):
            xs, ys = _decimate(t, np.asarray(v, dtype=float))
            out.append(_polyline(xs, ys, x0, x1, y0, y1, box, COLORS[j % len(COLORS)], dash=(j == 0)))
            ly = top + 14 + 14 * j
            lx = MARGIN_L + w - 120
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{COLORS[j % len(COLORS)]}"/>')
            out.append(f'<text x="{lx + 25}" y="{ly:.0f}" font-family="sans-serif" font-size="11">{name}</text>')
    bottom = MARGIN_T + 2 * plot_h + GAP
    out.append(f'<text x="{MARGIN_L}" y="{bottom + 18:.2f}" font-family="sans-serif" font-size="10">{x0:.4g} s</text>')
    out.append(f'<text x="{MARGIN_L + w}" y="{bottom + 18:.2f}" text-anchor="end" font-family="sans-serif" font-size="10">{x1:.4g} s</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trace_svg(trace, title="closed-loop response") -> str:
    return two_axis_plot(
        trace.t,
        [
            ("alpha", [("reference", trace.ref_alpha), ("output", trace.y_alpha)]),
            ("beta", [("reference", trace.ref_beta), ("output", trace.y_beta)]),
        ],
        title,
    )

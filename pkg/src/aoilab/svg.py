"""Minimal self-contained SVG 1.1 line and bar charts."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 190, 30, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def render_chart(
    x: Sequence[float],
    series: dict[str, Sequence[float]],
    x_label: str,
    y_label: str,
    title: str = "",
    style: str = "line",
) -> str:
    """Return an SVG document plotting each named series against ``x``.

    Missing values (NaN) break a line and are skipped by bars. With
    ``style="bar"`` the first series is drawn as bars and the rest as lines.
    """
    xs = [float(v) for v in x]
    finite_y = [float(v) for ys in series.values() for v in ys if math.isfinite(float(v))]
    if not xs or not finite_y:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(finite_y), max(finite_y)
    if style == "bar":
        y_lo = min(y_lo, 0.0)
        pad = 0.5 * (x_hi - x_lo) / max(len(xs) - 1, 1)
        x_lo, x_hi = x_lo - pad, x_hi + pad
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    y_pad = 0.05 * (y_hi - y_lo)
    y_hi += y_pad
    if y_lo != 0.0:
        y_lo -= y_pad

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v: float) -> float:
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v: float) -> float:
        return MARGIN_T + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    for t in nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_T + ph}" x2="{px:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.2f}" x2="{MARGIN_L}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN_L}" y1="{py:.2f}" x2="{MARGIN_L + pw}" y2="{py:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{py + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(x_label)}</text>')
    out.append(
        f'<text x="18" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.2f})">{escape(y_label)}</text>'
    )

    bar_w = 0.8 * pw / max(len(xs), 1)
    for k, (name, ys) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = [(sx(a), sy(float(b))) for a, b in zip(xs, ys) if math.isfinite(float(b))]
        if style == "bar" and k == 0:
            base = sy(max(y_lo, 0.0))
            for px, py in pts:
                out.append(
                    f'<rect x="{px - bar_w / 2:.2f}" y="{min(py, base):.2f}" width="{bar_w:.2f}" '
                    f'height="{abs(base - py):.2f}" fill="{color}" fill-opacity="0.5"/>'
                )
        else:
            runs: list[list[tuple[float, float]]] = [[]]
            for a, b in zip(xs, ys):
                if math.isfinite(float(b)):
                    runs[-1].append((sx(a), sy(float(b))))
                elif runs[-1]:
                    runs.append([])
            for run in runs:
                if len(run) > 1:
                    path = " ".join(f"{px:.2f},{py:.2f}" for px, py in run)
                    out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
            for px, py in pts:
                out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="{color}"/>')
        ly = MARGIN_T + 10 + 20 * k
        lx = MARGIN_L + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

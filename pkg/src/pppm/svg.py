"""Minimal standalone SVG line charts.

Each series becomes one ``<polyline>`` that also carries its data values
(12 significant digits) in ``data-x`` / ``data-y`` attributes, so the plotted
numbers can be read back exactly with :func:`read_svg_series`.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 960, 600
MARGIN = dict(left=80, right=220, top=50, bottom=70)
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
SVG_NS = "http://www.w3.org/2000/svg"


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-12 * step:
        ticks.append(round(start + k * step, 12))
        k += 1
    return ticks


def render(series, logx=False, title="", xlabel="E (photons per mode)", ylabel="rate (bits per mode)") -> str:
    """``series``: list of (label, xs, ys). Returns the SVG document text."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("nothing to plot")
    if logx and min(xs_all) <= 0:
        raise ValueError("log x axis needs positive x values")
    tx = math.log10 if logx else (lambda v: v)
    x0, x1 = tx(min(xs_all)), tx(max(xs_all))
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0, y1 = min(0.0, min(ys_all)), max(ys_all)
    if y1 == y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="{SVG_NS}" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="28" text-anchor="middle" font-family="sans-serif" font-size="18">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if logx:
        xticks = [10.0**k for k in range(math.floor(x0), math.ceil(x1) + 1) if x0 - 1e-9 <= k <= x1 + 1e-9]
    else:
        xticks = _nice_ticks(x0, x1)
    for t in xticks:
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{MARGIN["top"] + ph}" x2="{X:.2f}" y2="{MARGIN["top"] + ph + 6}" stroke="black"/>')
        out.append(
            f'<text x="{X:.2f}" y="{MARGIN["top"] + ph + 22}" text-anchor="middle" font-family="sans-serif" font-size="12">{fmt(t)}</text>'
        )
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{MARGIN["left"] - 6}" y1="{Y:.2f}" x2="{MARGIN["left"]}" y2="{Y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{MARGIN["left"] - 10}" y="{Y + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="12">{fmt(t)}</text>'
        )
    out.append(
        f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}" '
            f'data-label={quoteattr(label)} data-x="{" ".join(fmt(x) for x in xs)}" '
            f'data-y="{" ".join(fmt(y) for y in ys)}"/>'
        )
        ly = MARGIN["top"] + 20 + 22 * k
        lx = WIDTH - MARGIN["right"] + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{lx + 38}" y="{ly + 4}" font-family="sans-serif" font-size="13">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_svg_series(text: str) -> dict[str, tuple[list[float], list[float]]]:
    root = ET.fromstring(text)
    series = {}
    for el in root.iter(f"{{{SVG_NS}}}polyline"):
        xs = [float(v) for v in el.get("data-x", "").split()]
        ys = [float(v) for v in el.get("data-y", "").split()]
        series[el.get("data-label")] = (xs, ys)
    return series

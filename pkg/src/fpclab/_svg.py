"""Minimal SVG line plots, enough to eyeball a sweep without a plotting stack."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

_WIDTH, _HEIGHT = 640, 420
_MARGIN = dict(left=70, right=150, top=40, bottom=55)
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def line_plot(series, title="", xlabel="", ylabel="", log_y=False) -> str:
    """Render ``{label: (xs, ys)}`` as an SVG document string.

    Non-finite points (and non-positive ones on a log axis) break the line.
    """
    def ok(y):
        return math.isfinite(y) and (y > 0 or not log_y)

    xs = [x for xv, yv in series.values() for x, y in zip(xv, yv) if ok(y)]
    ys = [y for xv, yv in series.values() for y in yv if ok(y)]
    if not xs:
        xs, ys = [0.0, 1.0], [1.0, 10.0] if log_y else [0.0, 1.0]
    tf = math.log10 if log_y else (lambda v: v)
    x0, x1 = min(xs), max(xs)
    y0, y1 = tf(min(ys)), tf(max(ys))
    if log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    m = _MARGIN
    pw = _WIDTH - m["left"] - m["right"]
    ph = _HEIGHT - m["top"] - m["bottom"]

    def px(x):
        return m["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return m["top"] + (1.0 - (tf(y) - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect x="{m["left"]}" y="{m["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{m["left"] + pw / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{m["top"] + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {m["top"] + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.1f}" y1="{m["top"] + ph}" x2="{X:.1f}" y2="{m["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.1f}" y="{m["top"] + ph + 18}" text-anchor="middle">{t:g}</text>')
    yticks = range(int(y0), int(y1) + 1) if log_y else _nice_ticks(y0, y1)
    for t in yticks:
        Y = m["top"] + (1.0 - (t - y0) / (y1 - y0)) * ph
        label = f"1e{t}" if log_y else f"{t:g}"
        out.append(f'<line x1="{m["left"] - 5}" y1="{Y:.1f}" x2="{m["left"]}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<text x="{m["left"] - 8}" y="{Y + 4:.1f}" text-anchor="end">{label}</text>')

    for i, (label, (xv, yv)) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        runs, cur = [], []
        for x, y in zip(xv, yv):
            if ok(y):
                cur.append(f"{px(x):.2f},{py(y):.2f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{" ".join(run)}"/>')
        ly = m["top"] + 15 + 18 * i
        lx = _WIDTH - m["right"] + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

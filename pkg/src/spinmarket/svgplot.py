"""Minimal dependency-free SVG quick-look plots.

Not a plotting library: straight axes, 1-2-5 ticks, polylines and
scatter markers, nothing configurable beyond what the run outputs need.
Series longer than DECIMATE_ABOVE points are min-max decimated per pixel
column so bursts stay visible while files stay small.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 960, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50
DECIMATE_ABOVE = 100_000
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(lo_e, hi_e + 1)]


def _minmax_decimate(x: np.ndarray, y: np.ndarray, columns: int = 1200):
    """Per-column (min, max) pairs preserving the envelope of y."""
    edges = np.linspace(x[0], x[-1], columns + 1)
    idx = np.searchsorted(x, edges)
    xs, ys = [], []
    for k in range(columns):
        a, b = idx[k], max(idx[k] + 1, idx[k + 1])
        if a >= len(x):
            break
        seg = y[a:b]
        i_min, i_max = int(np.argmin(seg)), int(np.argmax(seg))
        for i in sorted({i_min, i_max}):
            xs.append(x[a + i])
            ys.append(seg[i])
    return np.array(xs), np.array(ys)


class _Canvas:
    def __init__(self, title, xlabel, ylabel, x_range, y_range,
                 log_x=False, log_y=False):
        self.parts: list[str] = []
        self.log_x, self.log_y = log_x, log_y
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if log_x:
            self.x0, self.x1 = math.log10(self.x0), math.log10(self.x1)
        if log_y:
            self.y0, self.y1 = math.log10(self.y0), math.log10(self.y1)
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self._frame(title, xlabel, ylabel)

    def px(self, x: float) -> float:
        if self.log_x:
            x = math.log10(x)
        span = WIDTH - MARGIN_L - MARGIN_R
        return MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * span

    def py(self, y: float) -> float:
        if self.log_y:
            y = math.log10(y)
        span = HEIGHT - MARGIN_T - MARGIN_B
        return HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * span

    def _frame(self, title, xlabel, ylabel):
        p = self.parts
        p.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
        p.append(f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" '
                 f'font-size="16" font-family="sans-serif">{escape(title)}</text>')
        x_axis_y = HEIGHT - MARGIN_B
        p.append(f'<line x1="{MARGIN_L}" y1="{x_axis_y}" x2="{WIDTH - MARGIN_R}" '
                 f'y2="{x_axis_y}" stroke="black"/>')
        p.append(f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
                 f'y2="{x_axis_y}" stroke="black"/>')
        if self.log_x:
            xticks = _log_ticks(10.0 ** self.x0, 10.0 ** self.x1)
        else:
            xticks = _ticks(self.x0, self.x1)
        for t in xticks:
            x = self.px(t)
            if x < MARGIN_L - 0.5 or x > WIDTH - MARGIN_R + 0.5:
                continue
            label = f"1e{int(math.log10(t))}" if self.log_x else f"{t:g}"
            p.append(f'<line x1="{x:.1f}" y1="{x_axis_y}" x2="{x:.1f}" '
                     f'y2="{x_axis_y + 5}" stroke="black"/>')
            p.append(f'<text x="{x:.1f}" y="{x_axis_y + 20}" text-anchor="middle" '
                     f'font-size="12" font-family="sans-serif">{label}</text>')
        if self.log_y:
            yticks = _log_ticks(10.0 ** self.y0, 10.0 ** self.y1)
        else:
            yticks = _ticks(self.y0, self.y1)
        for t in yticks:
            y = self.py(t)
            if y < MARGIN_T - 0.5 or y > x_axis_y + 0.5:
                continue
            label = f"1e{int(math.log10(t))}" if self.log_y else f"{t:g}"
            p.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.1f}" x2="{MARGIN_L}" '
                     f'y2="{y:.1f}" stroke="black"/>')
            p.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-size="12" font-family="sans-serif">{label}</text>')
        p.append(f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2}" y="{HEIGHT - 12}" '
                 f'text-anchor="middle" font-size="13" font-family="sans-serif">'
                 f'{escape(xlabel)}</text>')
        p.append(f'<text x="18" y="{(MARGIN_T + HEIGHT - MARGIN_B) / 2}" '
                 f'text-anchor="middle" font-size="13" font-family="sans-serif" '
                 f'transform="rotate(-90 18 {(MARGIN_T + HEIGHT - MARGIN_B) / 2})">'
                 f'{escape(ylabel)}</text>')

    def polyline(self, x, y, color):
        pts = " ".join(f"{self.px(a):.1f},{self.py(b):.1f}" for a, b in zip(x, y))
        self.parts.append(f'<polyline points="{pts}" fill="none" '
                          f'stroke="{color}" stroke-width="1"/>')

    def scatter(self, x, y, color):
        for a, b in zip(x, y):
            self.parts.append(f'<circle cx="{self.px(a):.1f}" cy="{self.py(b):.1f}" '
                              f'r="2.5" fill="{color}" fill-opacity="0.7"/>')

    def legend(self, names_colors):
        x = WIDTH - MARGIN_R - 150
        y = MARGIN_T + 10
        for name, color in names_colors:
            self.parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" '
                              f'stroke="{color}" stroke-width="2"/>')
            self.parts.append(f'<text x="{x + 28}" y="{y + 4}" font-size="12" '
                              f'font-family="sans-serif">{escape(name)}</text>')
            y += 18

    def save(self, path):
        body = "\n".join(self.parts)
        Path(path).write_text(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n{body}\n</svg>\n')


def line_plot(path, x, series, title, xlabel, ylabel):
    """Line plot of one or more named series over a shared x axis.

    ``series`` is a list of (name, values) pairs; NaNs are dropped per
    series. Long series are min-max decimated.
    """
    x = np.asarray(x, dtype=np.float64)
    cleaned = []
    for name, y in series:
        y = np.asarray(y, dtype=np.float64)
        good = np.isfinite(y)
        cleaned.append((name, x[good], y[good]))
    ys = np.concatenate([c[2] for c in cleaned if len(c[2])] or [np.zeros(1)])
    xs = np.concatenate([c[1] for c in cleaned if len(c[1])] or [np.zeros(1)])
    canvas = _Canvas(title, xlabel, ylabel,
                     (float(xs.min()), float(xs.max())),
                     (float(ys.min()), float(ys.max())))
    names_colors = []
    for k, (name, cx, cy) in enumerate(cleaned):
        if not len(cx):
            continue
        if len(cx) > DECIMATE_ABOVE:
            cx, cy = _minmax_decimate(cx, cy)
        color = PALETTE[k % len(PALETTE)]
        canvas.polyline(cx, cy, color)
        names_colors.append((name, color))
    if len(names_colors) > 1:
        canvas.legend(names_colors)
    canvas.save(path)


def loglog_scatter(path, groups, title, xlabel, ylabel):
    """Log-log scatter of (name, x, y) groups; non-positive points dropped."""
    cleaned = []
    for name, x, y in groups:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        good = (x > 0) & (y > 0)
        cleaned.append((name, x[good], y[good]))
    all_x = np.concatenate([c[1] for c in cleaned if len(c[1])] or [np.ones(1)])
    all_y = np.concatenate([c[2] for c in cleaned if len(c[2])] or [np.ones(1)])
    canvas = _Canvas(title, xlabel, ylabel,
                     (float(all_x.min()), float(all_x.max())),
                     (float(all_y.min()), float(all_y.max())),
                     log_x=True, log_y=True)
    names_colors = []
    for k, (name, cx, cy) in enumerate(cleaned):
        if not len(cx):
            continue
        if len(cx) > DECIMATE_ABOVE:
            keep = np.linspace(0, len(cx) - 1, DECIMATE_ABOVE).astype(int)
            cx, cy = cx[keep], cy[keep]
        color = PALETTE[k % len(PALETTE)]
        canvas.scatter(cx, cy, color)
        names_colors.append((name, color))
    if len(names_colors) > 1:
        canvas.legend(names_colors)
    canvas.save(path)

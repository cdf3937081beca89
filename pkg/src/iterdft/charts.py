"""Minimal self-contained SVG charts.

Output depends only on the data, so identical inputs give identical bytes.
"""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart", "signal_panels", "heatmap_grid"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _bounds(values) -> tuple[float, float]:
    vals = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if lo == hi:
        pad = 1.0 if lo == 0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _doc(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>\n"])


class _Frame:
    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / (hi - lo) * self.h

    def polyline(self, xs, ys, color, dashed=False, width=1.5) -> str:
        pts = " ".join(
            f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys) if math.isfinite(y)
        )
        dash = ' stroke-dasharray="4,3"' if dashed else ""
        return (
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>'
        )

    def axes(self, title=None, xlabel=None, ylabel=None) -> list[str]:
        x0, y0, w, h = self.x0, self.y0, self.w, self.h
        out = [f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>']
        for frac in (0.0, 0.5, 1.0):
            xv = self.xlim[0] + frac * (self.xlim[1] - self.xlim[0])
            yv = self.ylim[0] + frac * (self.ylim[1] - self.ylim[0])
            out.append(
                f'<text x="{_fmt(self.px(xv))}" y="{_fmt(y0 + h + 13)}" text-anchor="middle">{_fmt(xv)}</text>'
            )
            out.append(
                f'<text x="{_fmt(x0 - 4)}" y="{_fmt(self.py(yv) + 4)}" text-anchor="end">{_fmt(yv)}</text>'
            )
        if title:
            out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 - 6)}" text-anchor="middle" font-weight="bold">{escape(title)}</text>')
        if xlabel:
            out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 + h + 28)}" text-anchor="middle">{escape(xlabel)}</text>')
        if ylabel:
            cx, cy = x0 - 42, y0 + h / 2
            out.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
                f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(ylabel)}</text>'
            )
        return out


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 420,
) -> str:
    """Line chart of ``(label, xs, ys)`` series with point markers and a legend."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    frame = _Frame(70, 40, width - 100, height - 100, _bounds(xs_all), _bounds(ys_all))
    body = frame.axes(title, xlabel, ylabel)
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        body.append(frame.polyline(xs, ys, color))
        for x, y in zip(xs, ys):
            if math.isfinite(y):
                body.append(f'<circle cx="{_fmt(frame.px(x))}" cy="{_fmt(frame.py(y))}" r="2.5" fill="{color}"/>')
        if label:
            ly = 40 + 14 * (i + 1)
            body.append(f'<text x="{width - 40}" y="{ly}" text-anchor="end" fill="{color}">{escape(label)}</text>')
    return _doc(width, height, body)


def signal_panels(
    panels: Sequence[tuple[str, np.ndarray]],
    reference: np.ndarray | None = None,
    width: int = 720,
    panel_height: int = 110,
) -> str:
    """Stack of signal panels sharing a y-range.

    When ``reference`` is given it is drawn as a dashed red line behind each
    panel after the first, so deviations from it stand out.
    """
    values = [v for _, sig in panels for v in np.asarray(sig).ravel()]
    if reference is not None:
        values.extend(np.asarray(reference).ravel())
    ylim = _bounds(values)
    n = max(len(sig) for _, sig in panels)
    body: list[str] = []
    gap = 34
    for k, (title, sig) in enumerate(panels):
        frame = _Frame(60, 30 + k * (panel_height + gap), width - 80, panel_height, (0, max(n - 1, 1)), ylim)
        body.extend(frame.axes(title))
        t = np.arange(len(sig))
        if reference is not None and k > 0:
            body.append(frame.polyline(t, reference, "#d62728", dashed=True, width=1.0))
        body.append(frame.polyline(t, sig, "#222222", width=1.0))
    height = 30 + len(panels) * (panel_height + gap)
    return _doc(width, height, body)


def heatmap_grid(
    panels: Sequence[tuple[str, np.ndarray]],
    columns: int = 3,
    cell: int = 2,
) -> str:
    """Grid of matrix heatmaps on a shared blue-white-red scale."""
    vals = np.concatenate([np.asarray(m, dtype=float).ravel() for _, m in panels])
    vmax = float(np.max(np.abs(vals))) or 1.0
    rows_n = max(np.asarray(m).shape[0] for _, m in panels)
    cols_n = max(np.asarray(m).shape[1] for _, m in panels)
    pw, ph = cols_n * cell, rows_n * cell
    gap = 30
    body: list[str] = []
    for k, (title, m) in enumerate(panels):
        m = np.asarray(m, dtype=float)
        ox = 10 + (k % columns) * (pw + gap)
        oy = 24 + (k // columns) * (ph + gap)
        body.append(f'<text x="{ox + pw / 2}" y="{oy - 6}" text-anchor="middle">{escape(title)}</text>')
        for r in range(m.shape[0]):
            for c in range(m.shape[1]):
                v = m[r, c]
                if v == 0:
                    continue
                body.append(
                    f'<rect x="{ox + c * cell}" y="{oy + r * cell}" width="{cell}" height="{cell}" fill="{_color(v / vmax)}"/>'
                )
        body.append(f'<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>')
    nrows = -(-len(panels) // columns)
    width = 10 + min(columns, len(panels)) * (pw + gap)
    height = 24 + nrows * (ph + gap)
    return _doc(width, height, body)


def _color(t: float) -> str:
    t = max(-1.0, min(1.0, t))
    if t >= 0:
        r, g, b = 255, int(255 * (1 - t)), int(255 * (1 - t))
    else:
        r, g, b = int(255 * (1 + t)), int(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"

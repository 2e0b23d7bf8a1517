"""Minimal deterministic SVG charts (no plotting library needed).

Coordinates are printed with two decimals so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)

COLORS = {
    "mean": "#ff7f0e",
    "band": "#ff7f0e",
    "train": "#1f77b4",
    "test": "#d62728",
    "lf": "#2ca02c",
    "bar": "#1f77b4",
}


def nice_ticks(lo: float, hi: float, n: int = 6) -> list:
    if not hi > lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:g}"


class _Canvas:
    def __init__(self, xlim, ylim, title="", xlabel="", ylabel=""):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.parts = []
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.pw = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(self, x):
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def sy(self, y):
        return MARGIN["top"] + (1.0 - (y - self.y0) / (self.y1 - self.y0)) * self.ph

    def add(self, element: str):
        self.parts.append(element)

    def axes(self, xticks=True):
        left, top = MARGIN["left"], MARGIN["top"]
        bottom = top + self.ph
        self.add(f'<rect x="{left}" y="{top}" width="{self.pw}" height="{self.ph}" '
                 'fill="none" stroke="#333333"/>')
        for t in nice_ticks(self.y0, self.y1):
            y = _fmt(self.sy(t))
            self.add(f'<line x1="{left - 5}" y1="{y}" x2="{left}" y2="{y}" stroke="#333333"/>')
            self.add(f'<text x="{left - 8}" y="{y}" text-anchor="end" '
                     f'dominant-baseline="middle" font-size="11">{_tick_label(t)}</text>')
        if xticks:
            for t in nice_ticks(self.x0, self.x1):
                x = _fmt(self.sx(t))
                self.add(f'<line x1="{x}" y1="{bottom}" x2="{x}" y2="{bottom + 5}" '
                         'stroke="#333333"/>')
                self.add(f'<text x="{x}" y="{bottom + 18}" text-anchor="middle" '
                         f'font-size="11">{_tick_label(t)}</text>')
        cx = left + self.pw / 2
        self.add(f'<text x="{_fmt(cx)}" y="{HEIGHT - 12}" text-anchor="middle" '
                 f'font-size="13">{escape(self.xlabel)}</text>')
        cy = top + self.ph / 2
        self.add(f'<text x="16" y="{_fmt(cy)}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 16 {_fmt(cy)})">{escape(self.ylabel)}</text>')
        self.add(f'<text x="{_fmt(cx)}" y="24" text-anchor="middle" font-size="14">'
                 f'{escape(self.title)}</text>')

    def polyline(self, xs, ys, color, width=2):
        pts = " ".join(f"{_fmt(self.sx(x))},{_fmt(self.sy(y))}" for x, y in zip(xs, ys))
        self.add(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                 f'stroke-width="{width}"/>')

    def band(self, xs, lower, upper, color):
        pts = [f"{_fmt(self.sx(x))},{_fmt(self.sy(y))}" for x, y in zip(xs, upper)]
        pts += [f"{_fmt(self.sx(x))},{_fmt(self.sy(y))}"
                for x, y in zip(xs[::-1], lower[::-1])]
        self.add(f'<polygon points="{" ".join(pts)}" fill="{color}" fill-opacity="0.25" '
                 'stroke="none"/>')

    def circles(self, xs, ys, color, r=4):
        for x, y in zip(xs, ys):
            self.add(f'<circle cx="{_fmt(self.sx(x))}" cy="{_fmt(self.sy(y))}" r="{r}" '
                     f'fill="{color}"/>')

    def squares(self, xs, ys, color, r=3):
        for x, y in zip(xs, ys):
            self.add(f'<rect x="{_fmt(self.sx(x) - r)}" y="{_fmt(self.sy(y) - r)}" '
                     f'width="{2 * r}" height="{2 * r}" fill="{color}"/>')

    def crosses(self, xs, ys, color, r=5):
        for x, y in zip(xs, ys):
            px, py = self.sx(x), self.sy(y)
            self.add(f'<path d="M{_fmt(px - r)},{_fmt(py - r)} L{_fmt(px + r)},{_fmt(py + r)} '
                     f'M{_fmt(px - r)},{_fmt(py + r)} L{_fmt(px + r)},{_fmt(py - r)}" '
                     f'stroke="{color}" stroke-width="2"/>')

    def legend(self, entries):
        x = MARGIN["left"] + 10
        y = MARGIN["top"] + 14
        for label, color in entries:
            self.add(f'<rect x="{x}" y="{y - 8}" width="12" height="8" fill="{color}"/>')
            self.add(f'<text x="{x + 18}" y="{y}" font-size="11">{escape(label)}</text>')
            y += 16

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
                f'viewBox="0 0 {WIDTH} {HEIGHT}">')
        body = "\n".join(self.parts)
        return f'{head}\n<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'


def _limits(*arrays, pad=0.05):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays if a is not None
                           and np.size(a)])
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo if hi > lo else max(abs(hi), 1.0)
    return lo - pad * span, hi + pad * span


def curve_svg(grid, mean, lower, upper, train=None, test=None, lf=None,
              title="", xlabel="x", ylabel="y", band_label="confidence band") -> str:
    """Mean line with a shaded band, plus optional train/test/LF markers.

    ``train``, ``test`` and ``lf`` are ``(x, y)`` pairs of 1-D arrays.
    """
    grid = np.asarray(grid, dtype=float)
    xs = [grid] + [p[0] for p in (train, test, lf) if p is not None]
    ys = [lower, upper] + [p[1] for p in (train, test, lf) if p is not None]
    c = _Canvas(_limits(*xs, pad=0.0), _limits(*ys), title, xlabel, ylabel)
    c.axes()
    c.band(grid, np.asarray(lower), np.asarray(upper), COLORS["band"])
    c.polyline(grid, mean, COLORS["mean"])
    legend = [("mean", COLORS["mean"]), (band_label, COLORS["band"])]
    if lf is not None:
        c.squares(lf[0], lf[1], COLORS["lf"])
        legend.append(("low fidelity", COLORS["lf"]))
    if train is not None:
        c.circles(train[0], train[1], COLORS["train"])
        legend.append(("training", COLORS["train"]))
    if test is not None:
        c.crosses(test[0], test[1], COLORS["test"])
        legend.append(("test", COLORS["test"]))
    c.legend(legend)
    return c.render()


def split_svg(train, test, title="train/test split", xlabel="x", ylabel="y") -> str:
    c = _Canvas(_limits(train[0], test[0]), _limits(train[1], test[1]), title, xlabel, ylabel)
    c.axes()
    c.circles(train[0], train[1], COLORS["train"])
    c.crosses(test[0], test[1], COLORS["test"])
    c.legend([("training", COLORS["train"]), ("test", COLORS["test"])])
    return c.render()


def bar_svg(labels, values, title="RMSD", ylabel="RMSD") -> str:
    values = np.asarray(values, dtype=float)
    top = float(values.max()) * 1.15 if values.size and values.max() > 0 else 1.0
    c = _Canvas((0.0, float(len(labels))), (0.0, top), title, "", ylabel)
    c.axes(xticks=False)
    bottom = c.sy(0.0)
    for i, (label, v) in enumerate(zip(labels, values)):
        x0, x1 = c.sx(i + 0.2), c.sx(i + 0.8)
        y = c.sy(v)
        c.add(f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(x1 - x0)}" '
              f'height="{_fmt(bottom - y)}" fill="{COLORS["bar"]}"/>')
        c.add(f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(y - 5)}" text-anchor="middle" '
              f'font-size="11">{v:.3f}</text>')
        c.add(f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(bottom + 18)}" text-anchor="middle" '
              f'font-size="11">{escape(str(label))}</text>')
    return c.render()

"""Minimal hand-rolled SVG rendering for result figures.

Line plots, phase portraits, and the transfer-learning heatmap raster.
Output is deterministic: fixed layout, fixed-precision coordinates, no
timestamps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

WIDTH = 860
HEIGHT = 520
MARGIN_LEFT = 70
MARGIN_RIGHT = 30
MARGIN_TOP = 46
MARGIN_BOTTOM = 54


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str
    color: str = PALETTE[0]
    dashed: bool = False


def _ticks(lo: float, hi: float, n: int = 5):
    if not np.isfinite(lo) or not np.isfinite(hi) or lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, n)


def _fmt_tick(v: float) -> str:
    return f"{v:.4g}"


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.1f}" y="24" font-size="16" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>',
        ]

    def add(self, fragment: str) -> None:
        self.parts.append(fragment)

    def tostring(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _axes(canvas: _Canvas, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel, log_y=False):
    px0, px1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    py0, py1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP

    def sx(v):
        return px0 + (v - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(v):
        return py0 + (v - y_lo) / (y_hi - y_lo) * (py1 - py0)

    canvas.add(
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
        'fill="none" stroke="#444" stroke-width="1"/>'
    )
    for v in _ticks(x_lo, x_hi):
        x = sx(v)
        canvas.add(f'<line x1="{x:.2f}" y1="{py0}" x2="{x:.2f}" y2="{py0 + 5}" stroke="#444"/>')
        canvas.add(
            f'<text x="{x:.2f}" y="{py0 + 20}" font-size="11" text-anchor="middle" '
            f'font-family="sans-serif">{_fmt_tick(v)}</text>'
        )
    for v in _ticks(y_lo, y_hi):
        y = sy(v)
        label = f"1e{v:.1f}" if log_y else _fmt_tick(v)
        canvas.add(f'<line x1="{px0 - 5}" y1="{y:.2f}" x2="{px0}" y2="{y:.2f}" stroke="#444"/>')
        canvas.add(
            f'<text x="{px0 - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end" '
            f'font-family="sans-serif">{label}</text>'
        )
    canvas.add(
        f'<text x="{(px0 + px1) / 2:.1f}" y="{HEIGHT - 14}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>'
    )
    canvas.add(
        f'<text x="20" y="{(py0 + py1) / 2:.1f}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 20 {(py0 + py1) / 2:.1f})">{ylabel}</text>'
    )
    return sx, sy


def render_line_plot(series_list, title: str, xlabel: str, ylabel: str,
                     log_y: bool = False) -> str:
    """Polyline plot of one or more series; log_y plots log10 of |y|."""
    canvas = _Canvas(title)
    drawable = [s for s in series_list if len(np.ravel(s.x)) > 0]
    if not drawable:
        canvas.add(
            f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT / 2:.1f}" font-size="13" '
            'text-anchor="middle" font-family="sans-serif">(no data)</text>'
        )
        return canvas.tostring()

    def prep(s):
        y = np.asarray(s.y, dtype=np.float64)
        if log_y:
            y = np.log10(np.maximum(np.abs(y), 1e-16))
        return np.asarray(s.x, dtype=np.float64), y

    prepared = [prep(s) for s in drawable]
    x_lo = min(x.min() for x, _ in prepared)
    x_hi = max(x.max() for x, _ in prepared)
    y_lo = min(y.min() for _, y in prepared)
    y_hi = max(y.max() for _, y in prepared)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    sx, sy = _axes(canvas, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel, log_y=log_y)

    for s, (x, y) in zip(drawable, prepared):
        step = max(1, len(x) // 4000)  # cap point count, keep files small
        pts = " ".join(
            f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x[::step], y[::step])
        )
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        canvas.add(
            f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
            f'stroke-width="1.3"{dash}/>'
        )
    for i, s in enumerate(drawable):
        y = MARGIN_TOP + 14 + 16 * i
        x = WIDTH - MARGIN_RIGHT - 150
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        canvas.add(f'<line x1="{x}" y1="{y - 4}" x2="{x + 24}" y2="{y - 4}" '
                   f'stroke="{s.color}" stroke-width="2"{dash}/>')
        canvas.add(
            f'<text x="{x + 30}" y="{y}" font-size="12" '
            f'font-family="sans-serif">{s.label}</text>'
        )
    return canvas.tostring()


def render_heatmap(amplitudes, frequencies, scores, masked, title: str) -> str:
    """Grid raster: log10 NMSE as a red ramp (dark = low), masked cells blue."""
    amplitudes = np.asarray(amplitudes)
    frequencies = np.asarray(frequencies)
    scores = np.asarray(scores, dtype=np.float64)
    masked = np.asarray(masked, dtype=bool)
    canvas = _Canvas(title)
    px0, px1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    py0, py1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    n_a, n_f = len(amplitudes), len(frequencies)
    cell_w = (px1 - px0) / n_f
    cell_h = (py0 - py1) / n_a

    finite = scores[~masked]
    finite = finite[np.isfinite(finite) & (finite > 0)]
    lo = np.log10(finite.min()) if finite.size else -1.0
    hi = np.log10(finite.max()) if finite.size else 1.0
    if hi <= lo:
        hi = lo + 1.0

    for i in range(n_a):
        for j in range(n_f):
            x = px0 + j * cell_w
            y = py0 - (i + 1) * cell_h
            if masked[i, j] or not np.isfinite(scores[i, j]):
                fill = "#4472c4"
            else:
                frac = (np.log10(max(scores[i, j], 1e-300)) - lo) / (hi - lo)
                frac = min(max(frac, 0.0), 1.0)
                # dark red (low error) to light red (high error)
                r = int(120 + 135 * frac)
                g = int(10 + 190 * frac)
                b = int(10 + 190 * frac)
                fill = f"#{r:02x}{g:02x}{b:02x}"
            canvas.add(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w:.2f}" '
                f'height="{cell_h:.2f}" fill="{fill}" stroke="white" stroke-width="1"/>'
            )
    for j, f in enumerate(frequencies):
        x = px0 + (j + 0.5) * cell_w
        canvas.add(
            f'<text x="{x:.2f}" y="{py0 + 18}" font-size="11" text-anchor="middle" '
            f'font-family="sans-serif">{_fmt_tick(f)}</text>'
        )
    for i, a in enumerate(amplitudes):
        y = py0 - (i + 0.5) * cell_h
        canvas.add(
            f'<text x="{px0 - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end" '
            f'font-family="sans-serif">{_fmt_tick(a)}</text>'
        )
    canvas.add(
        f'<text x="{(px0 + px1) / 2:.1f}" y="{HEIGHT - 14}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif">frequency</text>'
    )
    canvas.add(
        f'<text x="20" y="{(py0 + py1) / 2:.1f}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 20 {(py0 + py1) / 2:.1f})">amplitude</text>'
    )
    canvas.add(
        f'<text x="{px0}" y="{py1 - 8}" font-size="11" font-family="sans-serif">'
        f'log10 NMSE from {lo:.2f} (dark) to {hi:.2f} (light); blue = resonant</text>'
    )
    return canvas.tostring()


def save_svg(path, svg: str) -> None:
    with open(path, "w") as fh:
        fh.write(svg)

"""Minimal dependency-free SVG writers for curves and heat maps."""

from __future__ import annotations

import numpy as np

__all__ = ["line_plot_svg", "heatmap_svg"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 80, 24, 40, 60
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _axis_ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def line_plot_svg(path, x, series: dict, title: str = "", xlabel: str = "",
                  ylabel: str = "") -> None:
    """Write a polyline plot; ``series`` maps label -> y array."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    all_y = np.concatenate([v for v in ys.values()]) if ys else np.asarray([0.0, 1.0])
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(np.nanmin(all_y)), float(np.nanmax(all_y))
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * pw if x_hi > x_lo else _ML

    def sy(v):
        return _MT + ph - (v - y_lo) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W/2}" y="24" text-anchor="middle" font-size="16">{_esc(title)}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="black"/>',
    ]
    for tv in _axis_ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{sx(tv):.1f}" y1="{_MT+ph}" x2="{sx(tv):.1f}" '
            f'y2="{_MT+ph+5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{sx(tv):.1f}" y="{_MT+ph+20}" text-anchor="middle" '
            f'font-size="11">{tv:.3g}</text>'
        )
    for tv in _axis_ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{_ML-5}" y1="{sy(tv):.1f}" x2="{_ML}" y2="{sy(tv):.1f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{_ML-8}" y="{sy(tv):.1f}" text-anchor="end" '
            f'font-size="11" dominant-baseline="middle">{tv:.3g}</text>'
        )
    parts.append(
        f'<text x="{_ML+pw/2}" y="{_H-12}" text-anchor="middle" font-size="13">'
        f"{_esc(xlabel)}</text>"
    )
    parts.append(
        f'<text x="20" y="{_MT+ph/2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {_MT+ph/2})">{_esc(ylabel)}</text>'
    )
    for i, (label, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{_ML+pw-6}" y="{_MT+16+14*i}" text-anchor="end" '
            f'font-size="12" fill="{color}">{_esc(label)}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def heatmap_svg(path, matrix, x, y, title: str = "", xlabel: str = "",
                ylabel: str = "", max_cells_x: int = 400) -> None:
    """Grayscale heat map (dark = high) with one rect per cell."""
    m = np.asarray(matrix, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if m.shape[1] > max_cells_x:
        stride = int(np.ceil(m.shape[1] / max_cells_x))
        m = m[:, ::stride]
        x = x[::stride]
    ny, nx = m.shape
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    cw, ch = pw / nx, ph / ny
    top = float(np.nanmax(m)) or 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W/2}" y="24" text-anchor="middle" font-size="16">{_esc(title)}</text>',
    ]
    for i in range(ny):
        # row 0 (lowest Y) at the bottom
        ypix = _MT + ph - (i + 1) * ch
        for j in range(nx):
            v = m[i, j] / top if top else 0.0
            g = int(round(255 * (1.0 - min(max(v, 0.0), 1.0))))
            parts.append(
                f'<rect x="{_ML+j*cw:.2f}" y="{ypix:.2f}" width="{cw+0.5:.2f}" '
                f'height="{ch+0.5:.2f}" fill="rgb({g},{g},{g})"/>'
            )
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="black"/>'
    )
    parts.append(
        f'<text x="{_ML+pw/2}" y="{_H-12}" text-anchor="middle" font-size="13">'
        f"{_esc(xlabel)}</text>"
    )
    parts.append(
        f'<text x="20" y="{_MT+ph/2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {_MT+ph/2})">{_esc(ylabel)}</text>'
    )
    parts.append(
        f'<text x="{_ML}" y="{_MT+ph+20}" font-size="11">x: {x[0]:.3g} .. {x[-1]:.3g}'
        f"   y: {y[0]:.3g} .. {y[-1]:.3g}</text>"
    )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")

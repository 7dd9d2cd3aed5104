"""Dependency-free SVG output: line charts and 2D deformation frames."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Mesh, PointSet

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / count))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= count:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:g}"


def line_chart(
    series: list[tuple[str, np.ndarray, np.ndarray]],
    path,
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
) -> None:
    """Write a line chart with one polyline per (label, xs, ys) series."""
    if not series:
        raise ValueError("no series to plot")

    def tx(v):
        return np.log10(v) if logx else np.asarray(v, dtype=float)

    def ty(v):
        return np.log10(v) if logy else np.asarray(v, dtype=float)

    all_x = np.concatenate([tx(xs) for _, xs, _ in series])
    all_y = np.concatenate([ty(ys) for _, _, ys in series])
    if not (np.isfinite(all_x).all() and np.isfinite(all_y).all()):
        raise ValueError("non-finite plot values (log scale needs positives)")
    x0, x1 = float(all_x.min()), float(all_x.max())
    y0, y1 = float(all_y.min()), float(all_y.max())
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(v):
        return _ML + (v - x0) / (x1 - x0) * pw

    def py(v):
        return _H - _MB - (v - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="15">'
        f"{title}</text>",
    ]
    for v in _ticks(x0, x1):
        x = px(v)
        label = _fmt(10 ** v) if logx else _fmt(v)
        parts.append(
            f'<line x1="{x:.1f}" y1="{_MT}" x2="{x:.1f}" y2="{_H - _MB}" '
            f'stroke="#ddd"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{_H - _MB + 16}" text-anchor="middle">'
            f"{label}</text>"
        )
    for v in _ticks(y0, y1):
        y = py(v)
        label = _fmt(10 ** v) if logy else _fmt(v)
        parts.append(
            f'<line x1="{_ML}" y1="{y:.1f}" x2="{_W - _MR}" y2="{y:.1f}" '
            f'stroke="#ddd"/>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{y + 4:.1f}" text-anchor="end">{label}</text>'
        )
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333"/>'
    )
    parts.append(
        f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_H / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_H / 2})">{ylabel}</text>'
    )
    for s, (label, xs, ys) in enumerate(series):
        color = _COLORS[s % len(_COLORS)]
        vx = tx(xs)
        vy = ty(ys)
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(vx, vy))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        ly = _MT + 14 + 16 * s
        lx = _W - _MR - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def write_frame_2d(mesh: Mesh, target: PointSet, path) -> None:
    """One deformation frame: the closed template loop over the target
    points, both in model coordinates."""
    if mesh.dim != 2 or target.dim != 2:
        raise ValueError("2D frame export needs 2D inputs")
    allp = np.concatenate([mesh.vertices.points, target.points])
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    size = 480
    pad = 30
    scale = (size - 2 * pad) / span

    def sx(x):
        return pad + (x - lo[0]) * scale

    def sy(y):
        return size - pad - (y - lo[1]) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for p in target.points:
        parts.append(
            f'<circle cx="{sx(p[0]):.1f}" cy="{sy(p[1]):.1f}" r="2.2" '
            f'fill="#d62728"/>'
        )
    verts = mesh.vertices.points
    for a, b in mesh.faces:
        parts.append(
            f'<line x1="{sx(verts[a, 0]):.1f}" y1="{sy(verts[a, 1]):.1f}" '
            f'x2="{sx(verts[b, 0]):.1f}" y2="{sy(verts[b, 1]):.1f}" '
            f'stroke="#1f77b4" stroke-width="1.2"/>'
        )
    for p in verts:
        parts.append(
            f'<circle cx="{sx(p[0]):.1f}" cy="{sy(p[1]):.1f}" r="1.6" '
            f'fill="#1f77b4"/>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")

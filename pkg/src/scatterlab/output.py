"""Deterministic artifact writers: versioned CSV tables, a structured
JSON summary, and dependency-free SVG plots.

SVG is hand-rolled on purpose: byte-identical output for identical
inputs, diff-able in review, no plotting dependency.  Floats are
formatted with %.12g in CSV and fixed decimals in SVG geometry, so
repeated runs of the same configuration produce identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

CSV_VERSION_LINE = "# scatterlab-csv v1"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if np.isnan(x):
        return "nan"
    return format(x, ".12g")


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [CSV_VERSION_LINE, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.ndarray,)):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_summary(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# SVG primitives


@dataclass(frozen=True)
class Series:
    """One curve or point set in a line plot."""

    x: np.ndarray
    y: np.ndarray
    label: str
    color: str
    markers: bool = False  # draw empty circles at the data points
    line: bool = True

    def finite_mask(self) -> np.ndarray:
        return np.isfinite(np.asarray(self.x, dtype=float)) & np.isfinite(
            np.asarray(self.y, dtype=float)
        )


_COLORMAP_STOPS = (
    (0.00, (0, 0, 4)),
    (0.25, (87, 16, 110)),
    (0.50, (188, 55, 84)),
    (0.75, (249, 142, 9)),
    (1.00, (252, 255, 164)),
)


def _colormap(v: float) -> str:
    v = min(max(v, 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(_COLORMAP_STOPS, _COLORMAP_STOPS[1:]):
        if v <= x1:
            f = 0.0 if x1 == x0 else (v - x0) / (x1 - x0)
            rgb = tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(252,255,164)"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
        return [lo]
    span = hi - lo
    raw = span / target
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(v) < 1e-12 * span else float(v))
        v += step
    return ticks


def _tick_label(v: float) -> str:
    return format(v, ".6g")


class _Svg:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x: float, y: float, s: str, size: int = 12, anchor: str = "middle",
             color: str = "black") -> None:
        self.add(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}" fill="{color}">{_escape(s)}</text>'
        )

    def line(self, x1, y1, x2, y2, color="black", width=1.0) -> None:
        self.add(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def tostring(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


@dataclass
class _Frame:
    """Axes frame mapping data coordinates to pixels."""

    x0: float
    y0: float
    w: float
    h: float
    xlo: float
    xhi: float
    ylo: float
    yhi: float

    def px(self, x: float) -> float:
        return self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * self.w

    def py(self, y: float) -> float:
        return self.y0 + self.h - (y - self.ylo) / (self.yhi - self.ylo) * self.h


def _draw_axes(svg: _Svg, fr: _Frame, xlabel: str, ylabel: str) -> None:
    svg.add(
        f'<rect x="{fr.x0:.2f}" y="{fr.y0:.2f}" width="{fr.w:.2f}" height="{fr.h:.2f}" '
        f'fill="none" stroke="black"/>'
    )
    for tx in _nice_ticks(fr.xlo, fr.xhi):
        px = fr.px(tx)
        svg.line(px, fr.y0 + fr.h, px, fr.y0 + fr.h + 4)
        svg.text(px, fr.y0 + fr.h + 16, _tick_label(tx), size=10)
    for ty in _nice_ticks(fr.ylo, fr.yhi):
        py = fr.py(ty)
        svg.line(fr.x0 - 4, py, fr.x0, py)
        svg.text(fr.x0 - 6, py + 3, _tick_label(ty), size=10, anchor="end")
    svg.text(fr.x0 + fr.w / 2, fr.y0 + fr.h + 32, xlabel, size=12)
    svg.add(
        f'<text x="14" y="{fr.y0 + fr.h / 2:.2f}" font-size="12" font-family="sans-serif" '
        f'text-anchor="middle" transform="rotate(-90 14 {fr.y0 + fr.h / 2:.2f})">'
        f"{_escape(ylabel)}</text>"
    )


def svg_line_plot(
    path,
    series: Sequence[Series],
    title: str,
    xlabel: str,
    ylabel: str,
    width: int = 640,
    height: int = 420,
) -> None:
    """Line/marker plot with axes, ticks, and a legend."""
    svg = _Svg(width, height)
    fr = _Frame(x0=64, y0=40, w=width - 88, h=height - 96, xlo=0, xhi=1, ylo=0, yhi=1)

    xs = np.concatenate([np.asarray(s.x, dtype=float)[s.finite_mask()] for s in series])
    ys = np.concatenate([np.asarray(s.y, dtype=float)[s.finite_mask()] for s in series])
    if xs.size == 0:
        xs = ys = np.array([0.0, 1.0])
    fr.xlo, fr.xhi = float(xs.min()), float(xs.max())
    fr.ylo, fr.yhi = float(ys.min()), float(ys.max())
    if fr.xhi == fr.xlo:
        fr.xhi = fr.xlo + 1.0
    pad = 0.05 * (fr.yhi - fr.ylo) or 0.5
    fr.ylo, fr.yhi = fr.ylo - pad, fr.yhi + pad

    svg.text(width / 2, 20, title, size=14)
    _draw_axes(svg, fr, xlabel, ylabel)

    for s in series:
        mask = s.finite_mask()
        px = [fr.px(v) for v in np.asarray(s.x, dtype=float)[mask]]
        py = [fr.py(v) for v in np.asarray(s.y, dtype=float)[mask]]
        if s.line and len(px) > 1:
            d = "M " + " L ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            svg.add(f'<path d="{d}" fill="none" stroke="{s.color}" stroke-width="1.5"/>')
        if s.markers:
            for a, b in zip(px, py):
                svg.add(
                    f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="none" '
                    f'stroke="{s.color}" stroke-width="1.2"/>'
                )

    ly = 40
    for s in series:
        lx = width - 20
        svg.line(lx - 26, ly - 4, lx - 12, ly - 4, color=s.color, width=2)
        svg.text(lx - 30, ly, s.label, size=10, anchor="end")
        ly += 14

    Path(path).write_text(svg.tostring())


def svg_heatmap(
    path,
    panels: Sequence[tuple[str, np.ndarray]],
    title: str,
    xlabel: str,
    ylabel: str,
    gamma: float = 0.35,
    width: int = 720,
) -> None:
    """Small-multiple intensity maps (rows x columns per panel).

    Each panel is normalized to its own maximum and drawn with a power-law
    intensity scale so weak outgoing packets stay visible.  Cells whose
    scaled intensity rounds to the background are skipped to keep files
    small.
    """
    if not panels:
        raise ValueError("svg_heatmap needs at least one panel")
    n_rows, n_cols = panels[0][1].shape
    panel_w = width - 110
    cell = max(min(panel_w / n_cols, 14.0), 0.8)
    panel_w = cell * n_cols
    panel_h = max(min(260.0, 9.0 * n_rows), 40.0)
    row_h = panel_h / n_rows
    gap = 34
    height = int(46 + len(panels) * (panel_h + gap))
    svg = _Svg(int(panel_w + 150), height)
    svg.text((panel_w + 150) / 2, 20, title, size=14)

    for idx, (label, data) in enumerate(panels):
        if data.shape != (n_rows, n_cols):
            raise ValueError("all heatmap panels must share one shape")
        x0, y0 = 70.0, 40.0 + idx * (panel_h + gap)
        top = float(data.max())
        svg.add(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{panel_w:.2f}" height="{panel_h:.2f}" '
            f'fill="{_colormap(0.0)}" stroke="black"/>'
        )
        if top > 0:
            scaled = (data / top) ** gamma
            rows, cols = np.nonzero(scaled >= 1.0 / 255.0)
            for r, c in zip(rows, cols):
                svg.add(
                    f'<rect x="{x0 + c * cell:.2f}" y="{y0 + r * row_h:.2f}" '
                    f'width="{cell:.2f}" height="{row_h:.2f}" '
                    f'fill="{_colormap(float(scaled[r, c]))}"/>'
                )
        svg.text(x0 + panel_w + 8, y0 + 12, label, size=11, anchor="start")
        svg.text(x0 - 8, y0 + 10, "0", size=9, anchor="end")
        svg.text(x0 - 8, y0 + panel_h, str(n_rows - 1), size=9, anchor="end")
    svg.text(70 + panel_w / 2, height - 8, xlabel, size=12)
    svg.add(
        f'<text x="14" y="{height / 2:.2f}" font-size="12" font-family="sans-serif" '
        f'text-anchor="middle" transform="rotate(-90 14 {height / 2:.2f})">'
        f"{_escape(ylabel)}</text>"
    )
    Path(path).write_text(svg.tostring())

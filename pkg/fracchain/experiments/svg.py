"""Minimal SVG line and scatter plots, drawn from artifact CSVs."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .io import read_csv

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 420
MARGIN = 60
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class PlotSpec:
    """Columns of a CSV to draw against each other."""

    x: str
    y: Sequence[str]
    title: str = ""
    logx: bool = False
    logy: bool = False
    scatter: bool = False
    series: Optional[str] = None


def _transform(values: List[float], log: bool) -> List[float]:
    return [math.log10(v) if log else v for v in values]


def _usable(value: str, log: bool) -> bool:
    try:
        v = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(v) and (v > 0 or not log)


def _ticks(low: float, high: float, count: int = 5) -> List[float]:
    if high == low:
        return [low]
    step = (high - low) / (count - 1)
    return [low + k * step for k in range(count)]


def _label(value: float, log: bool) -> str:
    return f"{10 ** value:.3g}" if log else f"{value:.3g}"


def render_svg(series: List[Tuple[str, List[float], List[float]]], spec: PlotSpec) -> str:
    """SVG text for named (x, y) series already on the plotting scale."""
    xs = [x for _, sx, _ in series for x in sx]
    ys = [y for _, _, sy in series for y in sy]
    if not xs:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    else:
        x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
    x_hi = x_hi if x_hi > x_lo else x_lo + 1.0
    y_hi = y_hi if y_hi > y_lo else y_lo + 1.0

    def px(x):
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(y):
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(spec.title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        parts.append(
            f'<text x="{px(t):.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{_label(t, spec.logx)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        parts.append(
            f'<text x="{MARGIN - 6}" y="{py(t) + 4:.1f}" text-anchor="end">{_label(t, spec.logy)}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">'
        f'{escape(spec.x)}{" (log)" if spec.logx else ""}</text>'
    )

    for k, (name, sx, sy) in enumerate(series):
        colour = COLOURS[k % len(COLOURS)]
        points = [(px(x), py(y)) for x, y in zip(sx, sy)]
        if spec.scatter:
            parts += [f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.5" fill="{colour}"/>' for x, y in points]
        elif points:
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{WIDTH - MARGIN + 4}" y="{MARGIN + 14 * k}" fill="{colour}">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_csv(csv_path: Path, spec: PlotSpec, svg_path: Optional[Path] = None) -> Path:
    """
    Plot columns of ``csv_path`` and write the SVG next to it.

    With ``spec.series`` set, rows are grouped by that column and each group
    becomes its own curve for every y column.
    """
    csv_path = Path(csv_path)
    svg_path = Path(svg_path) if svg_path is not None else csv_path.with_suffix(".svg")
    rows = read_csv(csv_path)

    groups = {}
    for row in rows:
        key = row.get(spec.series, "") if spec.series else ""
        groups.setdefault(key, []).append(row)

    series = []
    for key, group in groups.items():
        for column in spec.y:
            usable = [
                r for r in group
                if _usable(r.get(spec.x), spec.logx) and _usable(r.get(column), spec.logy)
            ]
            xs = _transform([float(r[spec.x]) for r in usable], spec.logx)
            ys = _transform([float(r[column]) for r in usable], spec.logy)
            name = f"{column} [{spec.series}={key}]" if spec.series else column
            series.append((name, xs, ys))

    svg_path.write_text(render_svg(series, spec), encoding="utf-8")
    logger.debug(f"Plotted {csv_path.name} -> {svg_path.name}")
    return svg_path

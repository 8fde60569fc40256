"""Static SVG charts: indicator trends over time and the cluster scatter."""

from __future__ import annotations

import numpy as np

from .data import INDICATOR_FIELDS, Dataset
from .errors import DimensionMismatchError, UnknownVariableError
from .svg import LinearScale, SvgCanvas

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 20, 30, 45


def _frame(canvas: SvgCanvas, xscale: LinearScale, yscale: LinearScale,
           x_label: str, y_label: str, x_ticks=None, y_fmt="{:.2f}"):
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    canvas.line(x0, y0, x1, y0)
    canvas.line(x0, y0, x0, y1)
    for value in (x_ticks if x_ticks is not None else xscale.ticks()):
        px = xscale(value)
        canvas.line(px, y0, px, y0 + 4)
        canvas.text(px, y0 + 16, f"{value:g}", anchor="middle")
    for value in yscale.ticks():
        py = yscale(value)
        canvas.line(x0 - 4, py, x0, py)
        canvas.text(x0 - 7, py + 3, y_fmt.format(value), anchor="end")
    canvas.text((x0 + x1) / 2, HEIGHT - 8, x_label, anchor="middle")
    canvas.text(14, (y0 + y1) / 2, y_label, anchor="middle")


def emit_temporal_chart(dataset: Dataset, variable: str) -> str:
    """Per-year mean of one indicator (solid line) with its min/max band."""
    if variable not in INDICATOR_FIELDS:
        raise UnknownVariableError(
            f"{variable!r} is not one of {', '.join(INDICATOR_FIELDS)}"
        )
    years = list(dataset.years)
    means, mins, maxs = [], [], []
    for year in years:
        values = [getattr(r, variable) for r in dataset if r.year == year]
        arr = np.asarray(values)
        means.append(float(arr.mean()))
        mins.append(float(arr.min()))
        maxs.append(float(arr.max()))

    xscale = LinearScale(min(years), max(years), MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    yscale = LinearScale(min(mins), max(maxs), HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)

    canvas = SvgCanvas(WIDTH, HEIGHT)
    canvas.text(WIDTH / 2, 18, f"{variable} over time", anchor="middle", size=13)
    _frame(canvas, xscale, yscale, "year", variable, x_ticks=years)

    band = [(xscale(y), yscale(v)) for y, v in zip(years, maxs)]
    band += [(xscale(y), yscale(v)) for y, v in zip(reversed(years), reversed(mins))]
    canvas.polygon(band, fill="#9ecae1", opacity=0.45)
    line_points = [(xscale(y), yscale(v)) for y, v in zip(years, means)]
    if len(line_points) > 1:
        canvas.polyline(line_points, stroke="#08519c", width=2.0)
    for px, py in line_points:
        canvas.circle(px, py, 2.5, fill="#08519c", cls="mean-point")
    return canvas.render()


def emit_cluster_scatter(projection, labels, title: str = "clusters") -> str:
    """2-D scatter colored by cluster label, with a cross at each cluster mean."""
    points = np.asarray(getattr(projection, "values", projection), dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise DimensionMismatchError("cluster scatter needs a 2-column projection")
    labels = np.asarray(labels)
    if len(labels) != len(points):
        raise DimensionMismatchError("labels length does not match projection rows")

    xscale = LinearScale(points[:, 0].min(), points[:, 0].max(),
                         MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    yscale = LinearScale(points[:, 1].min(), points[:, 1].max(),
                         HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)

    canvas = SvgCanvas(WIDTH, HEIGHT)
    canvas.text(WIDTH / 2, 18, title, anchor="middle", size=13)
    _frame(canvas, xscale, yscale, "component 1", "component 2")

    classes = [int(c) for c in np.unique(labels)]
    for point, label in zip(points, labels):
        color = PALETTE[classes.index(int(label)) % len(PALETTE)]
        canvas.circle(xscale(point[0]), yscale(point[1]), 3.0, fill=color, cls="point")
    for c in classes:
        center = points[labels == c].mean(axis=0)
        canvas.cross(xscale(center[0]), yscale(center[1]), 14,
                     stroke="#000000", width=2.5, cls="center")
    return canvas.render()

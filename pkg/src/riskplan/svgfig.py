"""Minimal deterministic SVG scene writer for headless figure export.

World coordinates are (north, east) meters with north pointing up in the
rendered figure. Output bytes depend only on the drawing calls, so repeated
renders of the same inputs are byte-identical.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from .geometry import Circle, ConvexPolygon, Obstacle, Point2, Workspace

PATH_COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
)


def _fmt(value: float) -> str:
    out = f"{value:.3f}"
    return "0.000" if out == "-0.000" else out


class SvgCanvas:
    """Accumulates SVG elements over a workspace-aligned viewport."""

    def __init__(self, workspace: Workspace, width: float = 640.0, margin: float = 24.0):
        self.workspace = workspace
        span_e = workspace.max.east - workspace.min.east
        span_n = workspace.max.north - workspace.min.north
        self.scale = (width - 2 * margin) / span_e
        self.margin = margin
        self.width = width
        self.height = 2 * margin + span_n * self.scale
        self._elements: List[str] = []

    def x(self, east: float) -> float:
        return self.margin + (east - self.workspace.min.east) * self.scale

    def y(self, north: float) -> float:
        return self.margin + (self.workspace.max.north - north) * self.scale

    def add(self, element: str) -> None:
        self._elements.append(element)

    def rect(self, p_min: Point2, p_max: Point2, fill: str, stroke: str = "none", opacity: float = 1.0) -> None:
        x = self.x(p_min.east)
        y = self.y(p_max.north)
        w = (p_max.east - p_min.east) * self.scale
        h = (p_max.north - p_min.north) * self.scale
        self.add(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" stroke="{stroke}" opacity="{_fmt(opacity)}"/>'
        )

    def circle(self, center: Point2, radius_m: float, fill: str, stroke: str = "none", opacity: float = 1.0) -> None:
        self.add(
            f'<circle cx="{_fmt(self.x(center.east))}" cy="{_fmt(self.y(center.north))}" '
            f'r="{_fmt(radius_m * self.scale)}" fill="{fill}" stroke="{stroke}" opacity="{_fmt(opacity)}"/>'
        )

    def line(self, a: Point2, b: Point2, stroke: str, width: float = 1.0, opacity: float = 1.0) -> None:
        self.add(
            f'<line x1="{_fmt(self.x(a.east))}" y1="{_fmt(self.y(a.north))}" '
            f'x2="{_fmt(self.x(b.east))}" y2="{_fmt(self.y(b.north))}" '
            f'stroke="{stroke}" stroke-width="{_fmt(width)}" opacity="{_fmt(opacity)}"/>'
        )

    def polyline(self, points: Sequence[Point2], stroke: str, width: float = 2.0, opacity: float = 1.0) -> None:
        coords = " ".join(f"{_fmt(self.x(p.east))},{_fmt(self.y(p.north))}" for p in points)
        self.add(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}" opacity="{_fmt(opacity)}"/>'
        )

    def polygon(self, points: Sequence[Point2], fill: str, stroke: str = "none", opacity: float = 1.0) -> None:
        coords = " ".join(f"{_fmt(self.x(p.east))},{_fmt(self.y(p.north))}" for p in points)
        self.add(f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" opacity="{_fmt(opacity)}"/>')

    def text(self, x_px: float, y_px: float, content: str, size: int = 12, fill: str = "#222222") -> None:
        self.add(
            f'<text x="{_fmt(x_px)}" y="{_fmt(y_px)}" font-size="{size}" '
            f'font-family="sans-serif" fill="{fill}">{content}</text>'
        )

    def obstacle(self, obs: Obstacle, fill: str = "#555555", show_inflation: bool = True) -> None:
        if show_inflation and obs.inflation > 0.0:
            if isinstance(obs.shape, Circle):
                self.circle(obs.shape.center, obs.shape.radius + obs.inflation, fill="#bbbbbb", opacity=0.5)
        if isinstance(obs.shape, Circle):
            self.circle(obs.shape.center, obs.shape.radius, fill=fill)
        elif isinstance(obs.shape, ConvexPolygon):
            self.polygon(obs.shape.vertices, fill=fill)

    def legend(self, entries: Sequence[Tuple[str, str]]) -> None:
        """entries: (color, label) pairs, rendered top-left."""
        for i, (color, label) in enumerate(entries):
            y = self.margin + 14 + 16 * i
            self.add(
                f'<rect x="{_fmt(self.margin + 4)}" y="{_fmt(y - 9)}" width="10" height="10" fill="{color}"/>'
            )
            self.text(self.margin + 18, y, label, size=11)

    def tostring(self) -> str:
        header = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
            f'<rect x="0" y="0" width="{_fmt(self.width)}" height="{_fmt(self.height)}" fill="#ffffff"/>\n'
        )
        return header + "\n".join(self._elements) + "\n</svg>\n"

    def write(self, destination) -> None:
        if hasattr(destination, "write"):
            destination.write(self.tostring())
        else:
            with open(destination, "w", encoding="utf-8") as fh:
                fh.write(self.tostring())


def gray_for(value: float, ceiling: float) -> str:
    """Map a hazard value in [0, ceiling] to a light-to-dark gray fill."""
    if ceiling <= 0.0:
        frac = 0.0
    else:
        frac = min(1.0, max(0.0, value / ceiling))
    level = round(245 - 185 * frac)
    return f"#{level:02x}{level:02x}{level:02x}"

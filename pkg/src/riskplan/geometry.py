"""2-D geometric primitives, obstacles, collision predicates, and a spatial index.

Coordinates follow the local NED convention used throughout the package:
``north`` and ``east`` in meters, angles never required (the planner is
purely geometric).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple


class DegenerateEdgeError(ValueError):
    """Raised when an operation receives a zero-length segment."""


class EmptyIndexError(ValueError):
    """Raised when a nearest query hits an empty spatial index."""


@dataclass(frozen=True)
class Point2:
    """A planar position (north, east) in meters."""

    north: float
    east: float

    def __post_init__(self):
        if not (math.isfinite(self.north) and math.isfinite(self.east)):
            raise ValueError(f"non-finite coordinates ({self.north}, {self.east})")

    def __iter__(self):
        yield self.north
        yield self.east

    def translated(self, d_north: float, d_east: float) -> "Point2":
        return Point2(self.north + d_north, self.east + d_east)


@dataclass(frozen=True)
class Segment:
    """Directed edge between two points. Zero length is representable but
    rejected by every edge-consuming operation."""

    a: Point2
    b: Point2

    @property
    def length(self) -> float:
        return euclidean_distance(self.a, self.b)

    def point_at(self, t: float) -> Point2:
        return Point2(
            self.a.north + t * (self.b.north - self.a.north),
            self.a.east + t * (self.b.east - self.a.east),
        )

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"circle radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with vertices in counterclockwise order (north up)."""

    vertices: Tuple[Point2, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if _signed_area(self.vertices) <= 0.0:
            raise ValueError("polygon vertices must be in counterclockwise order")

    @property
    def centroid(self) -> Point2:
        n = sum(p.north for p in self.vertices) / len(self.vertices)
        e = sum(p.east for p in self.vertices) / len(self.vertices)
        return Point2(n, e)


@dataclass(frozen=True)
class Obstacle:
    """A static or constant-velocity obstacle with a safety inflation margin.

    ``velocity`` is a (north, east) speed vector in m/s and must be zero for
    static obstacles. ``inflation`` enlarges the shape for all collision
    queries; it also absorbs the discretization error of sampled segment
    checks.
    """

    shape: object  # Circle | ConvexPolygon
    kind: str = "static"
    velocity: Tuple[float, float] = (0.0, 0.0)
    inflation: float = 0.5

    def __post_init__(self):
        if not isinstance(self.shape, (Circle, ConvexPolygon)):
            raise TypeError(f"unsupported obstacle shape {type(self.shape).__name__}")
        if self.kind not in ("static", "dynamic"):
            raise ValueError(f"obstacle kind must be static or dynamic, got {self.kind!r}")
        if self.inflation < 0.0:
            raise ValueError("inflation must be >= 0")
        if self.kind == "static" and (self.velocity[0] != 0.0 or self.velocity[1] != 0.0):
            raise ValueError("static obstacles must have zero velocity")

    @property
    def reference_point(self) -> Point2:
        if isinstance(self.shape, Circle):
            return self.shape.center
        return self.shape.centroid

    def contains(self, p: Point2, extra_margin: float = 0.0) -> bool:
        """True if ``p`` lies inside the shape inflated by inflation + margin."""
        margin = self.inflation + extra_margin
        if isinstance(self.shape, Circle):
            return euclidean_distance(p, self.shape.center) <= self.shape.radius + margin
        if _point_in_convex_polygon(p, self.shape.vertices):
            return True
        return _point_polygon_boundary_distance(p, self.shape.vertices) <= margin

    def translated(self, d_north: float, d_east: float, velocity: Optional[Tuple[float, float]] = None) -> "Obstacle":
        vel = self.velocity if velocity is None else velocity
        if isinstance(self.shape, Circle):
            shape: object = Circle(self.shape.center.translated(d_north, d_east), self.shape.radius)
        else:
            shape = ConvexPolygon(tuple(v.translated(d_north, d_east) for v in self.shape.vertices))
        return Obstacle(shape=shape, kind=self.kind, velocity=vel, inflation=self.inflation)


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned planning bounds."""

    min: Point2
    max: Point2

    def __post_init__(self):
        if not (self.min.north < self.max.north and self.min.east < self.max.east):
            raise ValueError("workspace min must be strictly below max on both axes")

    def contains(self, p: Point2) -> bool:
        return (
            self.min.north <= p.north <= self.max.north
            and self.min.east <= p.east <= self.max.east
        )

    def clamp(self, p: Point2) -> Point2:
        return Point2(
            min(max(p.north, self.min.north), self.max.north),
            min(max(p.east, self.min.east), self.max.east),
        )

    @property
    def diagonal(self) -> float:
        return euclidean_distance(self.min, self.max)

    @property
    def area(self) -> float:
        return (self.max.north - self.min.north) * (self.max.east - self.min.east)


def euclidean_distance(u: Point2, v: Point2) -> float:
    """Straight-line distance between two points in meters."""
    return math.hypot(u.north - v.north, u.east - v.east)


def point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    """Distance from ``p`` to the closed segment ``ab``."""
    abn = b.north - a.north
    abe = b.east - a.east
    denom = abn * abn + abe * abe
    if denom == 0.0:
        return euclidean_distance(p, a)
    t = ((p.north - a.north) * abn + (p.east - a.east) * abe) / denom
    t = min(1.0, max(0.0, t))
    return math.hypot(p.north - (a.north + t * abn), p.east - (a.east + t * abe))


def _signed_area(vertices: Sequence[Point2]) -> float:
    total = 0.0
    n = len(vertices)
    for i in range(n):
        p, q = vertices[i], vertices[(i + 1) % n]
        total += p.north * q.east - q.north * p.east
    # CCW in (north, east) with north as the "x" axis keeps the convention
    # consistent with the shoelace formula.
    return 0.5 * total


def _point_in_convex_polygon(p: Point2, vertices: Sequence[Point2]) -> bool:
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        cross = (b.north - a.north) * (p.east - a.east) - (b.east - a.east) * (p.north - a.north)
        if cross < 0.0:
            return False
    return True


def _point_polygon_boundary_distance(p: Point2, vertices: Sequence[Point2]) -> float:
    n = len(vertices)
    return min(point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) for i in range(n))


def point_clear(p: Point2, obstacles: Iterable[Obstacle]) -> bool:
    """True if ``p`` lies outside every inflated obstacle."""
    return not any(obs.contains(p) for obs in obstacles)


def sample_segment(s: Segment, resolution: float) -> List[Point2]:
    """Endpoint-inclusive sample points spaced at most ``resolution`` apart."""
    if resolution <= 0.0:
        raise ValueError("resolution must be > 0")
    length = s.length
    if length == 0.0:
        raise DegenerateEdgeError("zero-length segment")
    steps = max(1, math.ceil(length / resolution))
    return [s.point_at(i / steps) for i in range(steps + 1)]


def segment_clear(s: Segment, obstacles: Sequence[Obstacle], resolution: float = 0.25) -> bool:
    """Sampled collision check: no point spaced <= resolution along ``s``
    (endpoints included) may lie inside an inflated obstacle.

    The check is conservative only insofar as obstacle inflation absorbs the
    sampling gap; callers pick ``resolution`` well below the smallest
    inflation they rely on.
    """
    points = sample_segment(s, resolution)
    for obs in obstacles:
        for p in points:
            if obs.contains(p):
                return False
    return True


class GridIndex:
    """Uniform hash-grid over 2-D points supporting nearest/near queries.

    Insertion order defines node ids; all ties resolve to the lowest id so
    queries are deterministic. Average query cost is sub-linear for point
    sets spread over many cells; correctness never depends on cell size.
    """

    def __init__(self, cell_size: float = 5.0):
        if cell_size <= 0.0:
            raise ValueError("cell_size must be > 0")
        self.cell_size = float(cell_size)
        self._points: List[Point2] = []
        self._cells: dict = {}

    def __len__(self) -> int:
        return len(self._points)

    def point(self, node_id: int) -> Point2:
        return self._points[node_id]

    @property
    def points(self) -> List[Point2]:
        return list(self._points)

    def _cell_of(self, p: Point2) -> Tuple[int, int]:
        return (math.floor(p.north / self.cell_size), math.floor(p.east / self.cell_size))

    def insert(self, p: Point2) -> int:
        node_id = len(self._points)
        self._points.append(p)
        self._cells.setdefault(self._cell_of(p), []).append(node_id)
        return node_id

    def nearest(self, q: Point2) -> int:
        """Id of the stored point closest to ``q`` (ties: lowest id)."""
        if not self._points:
            raise EmptyIndexError("nearest query on empty index")
        ci, cj = self._cell_of(q)
        best_id = -1
        best_dist = math.inf
        ring = 0
        while True:
            for i, j in _ring_cells(ci, cj, ring):
                ids = self._cells.get((i, j))
                if not ids:
                    continue
                for node_id in ids:
                    d = euclidean_distance(self._points[node_id], q)
                    if d < best_dist or (d == best_dist and node_id < best_id):
                        best_dist = d
                        best_id = node_id
            ring += 1
            # Unexplored cells sit at Chebyshev >= ring, hence at least
            # (ring - 1) * cell_size from q; beyond that bound nothing can
            # beat or tie the current best.
            if best_id >= 0 and (ring - 1) * self.cell_size > best_dist:
                return best_id
            if best_id < 0 and ring > 8:
                # Query far outside the populated region: linear scan.
                for node_id, p in enumerate(self._points):
                    d = euclidean_distance(p, q)
                    if d < best_dist:
                        best_dist = d
                        best_id = node_id
                return best_id

    def near(self, q: Point2, radius: float) -> List[int]:
        """Ids of all stored points within ``radius`` of ``q`` (inclusive),
        ascending by insertion id."""
        if radius <= 0.0:
            raise ValueError("radius must be > 0")
        lo_i = math.floor((q.north - radius) / self.cell_size)
        hi_i = math.floor((q.north + radius) / self.cell_size)
        lo_j = math.floor((q.east - radius) / self.cell_size)
        hi_j = math.floor((q.east + radius) / self.cell_size)
        out: List[int] = []
        for i in range(lo_i, hi_i + 1):
            for j in range(lo_j, hi_j + 1):
                ids = self._cells.get((i, j))
                if not ids:
                    continue
                for node_id in ids:
                    if euclidean_distance(self._points[node_id], q) <= radius:
                        out.append(node_id)
        out.sort()
        return out


def _ring_cells(ci: int, cj: int, ring: int):
    """Cells at exact Chebyshev distance ``ring`` from (ci, cj)."""
    if ring == 0:
        yield (ci, cj)
        return
    for j in range(cj - ring, cj + ring + 1):
        yield (ci - ring, j)
        yield (ci + ring, j)
    for i in range(ci - ring + 1, ci + ring):
        yield (i, cj - ring)
        yield (i, cj + ring)

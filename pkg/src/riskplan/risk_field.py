"""Maps world geometry to belief-network evidence and hazard probabilities.

The pipeline is: continuous situational features at a point (distance to
shore, water depth, closest-point-of-approach geometry against moving
obstacles) -> discretized evidence states -> posterior probability of each
hazardous event -> point hazard = sum of event posteriors, bounded by the
number of events.

Two evaluation modes exist. The *exact* mode assigns hard evidence bins and
returns the posterior sum for that bin combination, exactly as the network
sees it. The *blended* mode (on by default in the shipped reference model)
linearly interpolates the cached per-bin posteriors across a narrow
transition band around each bin edge, yielding a hazard field that is
continuous in position; this keeps sampled edge integrals stable under
refinement while agreeing with the exact mode away from bin boundaries.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .bbn import BayesNet, Evidence, posterior
from .geometry import (
    DegenerateEdgeError,
    Obstacle,
    Point2,
    Segment,
    Workspace,
    euclidean_distance,
    point_segment_distance,
)
from .svgfig import SvgCanvas, gray_for

# Canonical evidence node names used by the shipped reference network.
SHORE_NODE = "distance_to_shore"
DEPTH_NODE = "water_depth"
DCPA_NODE = "dcpa"
COLLISION_COURSE_NODE = "collision_course"
GROUNDING_COURSE_NODE = "grounding_course"

FLAG_TRUE = "yes"
FLAG_FALSE = "no"


@dataclass(frozen=True)
class DepthGrid:
    """Water depth samples on a regular grid, bilinearly interpolated.

    ``values[i, j]`` is the depth (m, positive down) at the center of the
    cell whose south-west corner is ``origin + (i, j) * resolution``.
    """

    origin: Point2
    resolution: float
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("depth grid must be a non-empty 2-D array")
        if self.resolution <= 0.0:
            raise ValueError("depth grid resolution must be > 0")
        object.__setattr__(self, "values", arr)

    @classmethod
    def uniform(cls, workspace: Workspace, depth: float, resolution: float = 10.0) -> "DepthGrid":
        rows = max(2, math.ceil((workspace.max.north - workspace.min.north) / resolution) + 1)
        cols = max(2, math.ceil((workspace.max.east - workspace.min.east) / resolution) + 1)
        return cls(workspace.min, resolution, np.full((rows, cols), float(depth)))

    def covers(self, workspace: Workspace) -> bool:
        span_n = (self.values.shape[0] - 1) * self.resolution
        span_e = (self.values.shape[1] - 1) * self.resolution
        eps = 1e-9
        return (
            self.origin.north <= workspace.min.north + eps
            and self.origin.east <= workspace.min.east + eps
            and self.origin.north + span_n >= workspace.max.north - eps
            and self.origin.east + span_e >= workspace.max.east - eps
        )

    def depth_at(self, p: Point2) -> float:
        fi = (p.north - self.origin.north) / self.resolution
        fj = (p.east - self.origin.east) / self.resolution
        fi = min(max(fi, 0.0), self.values.shape[0] - 1.0)
        fj = min(max(fj, 0.0), self.values.shape[1] - 1.0)
        i0 = min(int(fi), self.values.shape[0] - 2)
        j0 = min(int(fj), self.values.shape[1] - 2)
        di = fi - i0
        dj = fj - j0
        v = self.values
        return float(
            v[i0, j0] * (1 - di) * (1 - dj)
            + v[i0 + 1, j0] * di * (1 - dj)
            + v[i0, j0 + 1] * (1 - di) * dj
            + v[i0 + 1, j0 + 1] * di * dj
        )


@dataclass(frozen=True)
class EnvironmentState:
    """Immutable world snapshot: bounds, shoreline, bathymetry, obstacles.

    ``goal`` gives the reference travel direction for closest-approach
    predictions (the planner is geometric and carries no heading state), and
    ``own_speed`` the assumed cruise speed along it.
    """

    workspace: Workspace
    shoreline: Tuple[Tuple[Point2, ...], ...] = ()
    depth: Optional[DepthGrid] = None
    obstacles: Tuple[Obstacle, ...] = ()
    own_speed: float = 2.0
    goal: Optional[Point2] = None

    def __post_init__(self):
        object.__setattr__(self, "shoreline", tuple(tuple(line) for line in self.shoreline))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.own_speed <= 0.0:
            raise ValueError("own_speed must be > 0")
        if self.depth is not None and not self.depth.covers(self.workspace):
            raise ValueError("depth grid does not cover the workspace")
        for line in self.shoreline:
            if len(line) < 2:
                raise ValueError("shoreline polylines need at least 2 points")

    @property
    def dynamic_obstacles(self) -> Tuple[Obstacle, ...]:
        return tuple(o for o in self.obstacles if o.kind == "dynamic")

    def with_obstacles(self, obstacles: Sequence[Obstacle]) -> "EnvironmentState":
        return EnvironmentState(
            workspace=self.workspace,
            shoreline=self.shoreline,
            depth=self.depth,
            obstacles=tuple(obstacles),
            own_speed=self.own_speed,
            goal=self.goal,
        )

    def with_goal(self, goal: Optional[Point2]) -> "EnvironmentState":
        return EnvironmentState(
            workspace=self.workspace,
            shoreline=self.shoreline,
            depth=self.depth,
            obstacles=self.obstacles,
            own_speed=self.own_speed,
            goal=goal,
        )

    def shore_distance(self, p: Point2) -> float:
        best = math.inf
        for line in self.shoreline:
            for a, b in zip(line, line[1:]):
                d = point_segment_distance(p, a, b)
                if d < best:
                    best = d
        return best

    def depth_value(self, p: Point2) -> float:
        if self.depth is None:
            return math.inf
        return self.depth.depth_at(p)


def closest_approach(rel_position: Tuple[float, float], rel_velocity: Tuple[float, float]) -> Tuple[float, float]:
    """Minimum future separation for constant relative motion.

    Returns ``(dcpa, t_star)`` where ``t_star = max(0, -r.v / |v|^2)`` and
    ``dcpa = |r + v t_star|``. A zero relative velocity gives the current
    separation at ``t_star = 0``.
    """
    rn, re = rel_position
    vn, ve = rel_velocity
    v2 = vn * vn + ve * ve
    if v2 == 0.0:
        return math.hypot(rn, re), 0.0
    t_star = max(0.0, -(rn * vn + re * ve) / v2)
    return math.hypot(rn + vn * t_star, re + ve * t_star), t_star


@dataclass(frozen=True)
class SituationFeatures:
    """Continuous inputs to evidence discretization at one point."""

    shore_distance: float
    depth: float
    dcpa: float
    approach_time: float  # t* for the obstacle realizing the minimum dcpa
    min_forward_depth: float


@dataclass(frozen=True)
class EvidenceMapper:
    """Discretizes continuous situational features into evidence states.

    Bin edges are in native units (meters); each continuous node has
    ``len(states) - 1`` strictly increasing edges, smallest-value bin first.
    ``*_band`` widths control the blended mode's linear crossfade around
    each bin edge and never affect hard state assignment.
    """

    shore_bins: Tuple[float, ...] = (20.0, 60.0)
    shore_states: Tuple[str, ...] = ("near", "medium", "far")
    depth_bins: Tuple[float, ...] = (3.0, 10.0)
    depth_states: Tuple[str, ...] = ("shallow", "medium", "deep")
    dcpa_bins: Tuple[float, ...] = (10.0, 30.0)
    dcpa_states: Tuple[str, ...] = ("near", "medium", "far")
    course_dcpa_threshold: float = 15.0
    draft: float = 2.0
    forward_projection: float = 15.0
    projection_step: float = 2.5
    shore_band: float = 8.0
    depth_band: float = 1.0
    dcpa_band: float = 8.0
    course_time_band: float = 8.0

    def __post_init__(self):
        for name, edges, states in (
            ("shore", self.shore_bins, self.shore_states),
            ("depth", self.depth_bins, self.depth_states),
            ("dcpa", self.dcpa_bins, self.dcpa_states),
        ):
            if len(edges) != len(states) - 1:
                raise ValueError(f"{name}: bin count must equal state count - 1")
            if any(b >= c for b, c in zip(edges, edges[1:])):
                raise ValueError(f"{name}: bin edges must be strictly increasing")

    def features_at(self, p: Point2, env: EnvironmentState) -> SituationFeatures:
        shore = env.shore_distance(p)
        depth = env.depth_value(p)

        own_v = (0.0, 0.0)
        heading: Optional[Tuple[float, float]] = None
        if env.goal is not None:
            d = euclidean_distance(p, env.goal)
            if d > 0.0:
                heading = ((env.goal.north - p.north) / d, (env.goal.east - p.east) / d)
                own_v = (heading[0] * env.own_speed, heading[1] * env.own_speed)

        dcpa = math.inf
        t_star = math.inf
        for obs in env.dynamic_obstacles:
            ref = obs.reference_point
            rel_p = (ref.north - p.north, ref.east - p.east)
            rel_v = (obs.velocity[0] - own_v[0], obs.velocity[1] - own_v[1])
            d, t = closest_approach(rel_p, rel_v)
            if d < dcpa:
                dcpa = d
                t_star = t

        if env.depth is None:
            min_fwd = math.inf
        else:
            min_fwd = depth
            if heading is not None and self.forward_projection > 0.0:
                steps = max(1, math.ceil(self.forward_projection / self.projection_step))
                for k in range(1, steps + 1):
                    dist = self.forward_projection * k / steps
                    probe = env.workspace.clamp(
                        Point2(p.north + heading[0] * dist, p.east + heading[1] * dist)
                    )
                    min_fwd = min(min_fwd, env.depth.depth_at(probe))

        return SituationFeatures(
            shore_distance=shore,
            depth=depth,
            dcpa=dcpa,
            approach_time=t_star,
            min_forward_depth=min_fwd,
        )

    # -- hard (exact-bin) evidence ------------------------------------

    def hard_states(self, f: SituationFeatures) -> Dict[str, str]:
        collision_course = (
            math.isfinite(f.dcpa)
            and f.dcpa < self.course_dcpa_threshold
            and f.approach_time > 0.0
            and math.isfinite(f.approach_time)
        )
        grounding_course = f.min_forward_depth < self.draft
        return {
            SHORE_NODE: _bin_state(f.shore_distance, self.shore_bins, self.shore_states),
            DEPTH_NODE: _bin_state(f.depth, self.depth_bins, self.depth_states),
            DCPA_NODE: _bin_state(f.dcpa, self.dcpa_bins, self.dcpa_states),
            COLLISION_COURSE_NODE: FLAG_TRUE if collision_course else FLAG_FALSE,
            GROUNDING_COURSE_NODE: FLAG_TRUE if grounding_course else FLAG_FALSE,
        }

    # -- blended (transition-band) evidence ----------------------------

    def soft_weights(self, f: SituationFeatures) -> List[Tuple[Dict[str, str], float]]:
        """Weighted evidence-state combinations (weights sum to 1)."""
        axes: List[List[Tuple[str, float]]] = [
            _banded_weights(f.shore_distance, self.shore_bins, self.shore_states, self.shore_band),
            _banded_weights(f.depth, self.depth_bins, self.depth_states, self.depth_band),
            _banded_weights(f.dcpa, self.dcpa_bins, self.dcpa_states, self.dcpa_band),
            _flag_weights(self._collision_course_fraction(f)),
            _flag_weights(self._grounding_course_fraction(f)),
        ]
        names = (SHORE_NODE, DEPTH_NODE, DCPA_NODE, COLLISION_COURSE_NODE, GROUNDING_COURSE_NODE)
        combos: List[Tuple[Dict[str, str], float]] = [({}, 1.0)]
        for name, options in zip(names, axes):
            nxt: List[Tuple[Dict[str, str], float]] = []
            for states, w in combos:
                for label, wa in options:
                    if wa <= 0.0:
                        continue
                    merged = dict(states)
                    merged[name] = label
                    nxt.append((merged, w * wa))
            combos = nxt
        return combos

    def _collision_course_fraction(self, f: SituationFeatures) -> float:
        if not math.isfinite(f.dcpa):
            return 0.0
        near = _ramp_down(f.dcpa, self.course_dcpa_threshold, self.dcpa_band)
        if self.course_time_band <= 0.0:
            approaching = 1.0 if (f.approach_time > 0.0 and math.isfinite(f.approach_time)) else 0.0
        elif not math.isfinite(f.approach_time):
            approaching = 0.0
        else:
            approaching = min(1.0, max(0.0, f.approach_time / self.course_time_band))
        return near * approaching

    def _grounding_course_fraction(self, f: SituationFeatures) -> float:
        if not math.isfinite(f.min_forward_depth):
            return 0.0
        return _ramp_down(f.min_forward_depth, self.draft, self.depth_band)


def _bin_state(value: float, edges: Tuple[float, ...], states: Tuple[str, ...]) -> str:
    if not math.isfinite(value):
        return states[-1]
    return states[bisect_right(edges, value)]


def _banded_weights(
    value: float, edges: Tuple[float, ...], states: Tuple[str, ...], band: float
) -> List[Tuple[str, float]]:
    """Pure bin weight away from edges, linear crossfade within band/2."""
    if not math.isfinite(value):
        return [(states[-1], 1.0)]
    if band <= 0.0:
        return [(_bin_state(value, edges, states), 1.0)]
    for k, edge in enumerate(edges):
        if abs(value - edge) < band / 2.0:
            w_hi = 0.5 + (value - edge) / band
            return [(states[k], 1.0 - w_hi), (states[k + 1], w_hi)]
    return [(_bin_state(value, edges, states), 1.0)]


def _flag_weights(fraction: float) -> List[Tuple[str, float]]:
    fraction = min(1.0, max(0.0, fraction))
    return [(FLAG_TRUE, fraction), (FLAG_FALSE, 1.0 - fraction)]


def _ramp_down(value: float, threshold: float, band: float) -> float:
    """1 well below threshold, 0 well above, linear across the band."""
    if band <= 0.0:
        return 1.0 if value < threshold else 0.0
    return min(1.0, max(0.0, 0.5 + (threshold - value) / band))


@dataclass(frozen=True)
class RiskModel:
    """Hazardous events, their network, and the evidence discretization.

    ``events`` pairs each event node with its consequence weight; the number
    of events defines the hazard ceiling (a point hazard is a sum of event
    probabilities, one per event). ``blend_bins`` selects the blended
    evaluation mode described in the module docstring.
    """

    events: Tuple[Tuple[str, float], ...]
    net: BayesNet
    mapper: EvidenceMapper = field(default_factory=EvidenceMapper)
    blend_bins: bool = True

    def __post_init__(self):
        if not self.events:
            raise ValueError("risk model needs at least one event")
        for name, weight in self.events:
            if name not in self.net.event_nodes:
                raise ValueError(f"{name!r} is not an event node of the network")
            if weight < 0.0:
                raise ValueError(f"consequence weight for {name!r} must be >= 0")
        object.__setattr__(self, "_posterior_cache", {})

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def consequence_weights(self) -> Tuple[float, ...]:
        return tuple(w for _, w in self.events)

    def event_posteriors(self, states: Mapping[str, str]) -> Tuple[float, ...]:
        """P(event occurs | evidence states), cached per state combination."""
        key = tuple(sorted(states.items()))
        cached = self._posterior_cache.get(key)
        if cached is not None:
            return cached
        ev = Evidence(states)
        probs = tuple(
            posterior(self.net, ev, name)[self.net.occurs_state(name)]
            for name, _ in self.events
        )
        self._posterior_cache[key] = probs
        return probs

    def point_posteriors(self, f: SituationFeatures) -> Tuple[float, ...]:
        """Per-event occurrence probabilities for one feature vector."""
        if not self.blend_bins:
            return self.event_posteriors(_hard := self.mapper.hard_states(f))
        totals = [0.0] * self.n_events
        for states, w in self.mapper.soft_weights(f):
            probs = self.event_posteriors(states)
            for i, p in enumerate(probs):
                totals[i] += w * p
        return tuple(totals)


def evidence_at(p: Point2, env: EnvironmentState, mapper: EvidenceMapper) -> Evidence:
    """Hard evidence states for the five situational nodes at ``p``."""
    if not env.workspace.contains(p):
        raise ValueError(f"point ({p.north}, {p.east}) outside workspace")
    return Evidence(mapper.hard_states(mapper.features_at(p, env)))


def hazard_at(p: Point2, env: EnvironmentState, model: RiskModel) -> float:
    """Summed event probability at ``p``; bounded by the event count."""
    if not env.workspace.contains(p):
        raise ValueError(f"point ({p.north}, {p.east}) outside workspace")
    return sum(model.point_posteriors(model.mapper.features_at(p, env)))


def _edge_samples(s: Segment, spacing: float) -> List[Point2]:
    """Midpoints of equal subdivisions no longer than ``spacing``."""
    if spacing <= 0.0:
        raise ValueError("spacing must be > 0")
    length = s.length
    if length == 0.0:
        raise DegenerateEdgeError("zero-length edge")
    n = max(1, math.ceil(length / spacing))
    return [s.point_at((i + 0.5) / n) for i in range(n)]


def edge_hazard(s: Segment, env: EnvironmentState, model: RiskModel, spacing: float = 1.0) -> float:
    """Mean point hazard over midpoint samples spaced at most ``spacing``.

    A mean (not a length-weighted sum) keeps edge hazards comparable across
    trees with different step sizes and makes subdividing an edge cost-
    neutral; the path hazard is the plain sum of its edge hazards.
    """
    samples = _edge_samples(s, spacing)
    return sum(hazard_at(p, env, model) for p in samples) / len(samples)


def consequence_cost(s: Segment, env: EnvironmentState, model: RiskModel, spacing: float = 1.0) -> float:
    """Consequence-weighted variant of :func:`edge_hazard`."""
    samples = _edge_samples(s, spacing)
    weights = model.consequence_weights
    total = 0.0
    for p in samples:
        probs = model.point_posteriors(model.mapper.features_at(p, env))
        total += sum(c * q for c, q in zip(weights, probs))
    return total / len(samples)


class HazardField:
    """Cached hazard queries against one environment snapshot.

    Point hazards are memoized on a square cell grid (``cell_size`` meters;
    every point in a cell reports the hazard of the cell center). This is
    the planner-facing query path: deterministic, cheap, and refreshed by
    building a new field whenever the environment changes. ``cell_size = 0``
    disables quantization.
    """

    def __init__(self, env: EnvironmentState, model: RiskModel, cell_size: float = 1.0):
        if cell_size < 0.0:
            raise ValueError("cell_size must be >= 0")
        self.env = env
        self.model = model
        self.cell_size = float(cell_size)
        self._cells: Dict[Tuple[int, int], float] = {}

    def hazard_at(self, p: Point2) -> float:
        if self.cell_size == 0.0:
            return hazard_at(p, self.env, self.model)
        i = math.floor(p.north / self.cell_size)
        j = math.floor(p.east / self.cell_size)
        key = (i, j)
        cached = self._cells.get(key)
        if cached is not None:
            return cached
        center = self.env.workspace.clamp(
            Point2((i + 0.5) * self.cell_size, (j + 0.5) * self.cell_size)
        )
        value = hazard_at(center, self.env, self.model)
        self._cells[key] = value
        return value

    def edge_hazard(self, s: Segment, spacing: float = 1.0) -> float:
        samples = _edge_samples(s, spacing)
        return sum(self.hazard_at(p) for p in samples) / len(samples)

    @property
    def ceiling(self) -> float:
        return float(self.model.n_events)


# --------------------------------------------------------------------------
# Risk maps

@dataclass(frozen=True)
class RiskMap:
    """Interpolated hazard grid for visualization and risk-biased sampling.

    ``values[i, j]`` is the hazard at the center of cell (i, j); cell (0, 0)
    sits at the workspace minimum corner, i runs north, j runs east.
    """

    origin: Point2
    resolution: float
    values: np.ndarray
    method: str = "idw"
    ceiling: float = 2.0

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("risk map must be a non-empty 2-D grid")
        if not np.all(np.isfinite(arr)):
            raise ValueError("risk map cells must be finite")
        if arr.min() < -1e-12 or arr.max() > self.ceiling + 1e-12:
            raise ValueError("risk map cells must lie in [0, ceiling]")
        object.__setattr__(self, "values", arr)

    def cell_center(self, i: int, j: int) -> Point2:
        return Point2(
            self.origin.north + (i + 0.5) * self.resolution,
            self.origin.east + (j + 0.5) * self.resolution,
        )

    def value_at(self, p: Point2) -> float:
        i = int((p.north - self.origin.north) / self.resolution)
        j = int((p.east - self.origin.east) / self.resolution)
        i = min(max(i, 0), self.values.shape[0] - 1)
        j = min(max(j, 0), self.values.shape[1] - 1)
        return float(self.values[i, j])


def build_risk_map(
    nodes: Sequence[Tuple[Point2, float]],
    workspace: Workspace,
    resolution: float = 2.0,
    method: str = "idw",
    ceiling: float = 2.0,
) -> RiskMap:
    """Interpolate sampled (position, hazard) pairs onto a regular grid.

    ``idw`` is inverse-distance weighting with power 2; ``bilinear`` uses
    piecewise-linear interpolation over a triangulation of the samples
    (nearest-sample fill outside the hull). Any cell that contains a sample
    reproduces that sample's value exactly.
    """
    if not nodes:
        raise ValueError("risk map needs at least one sample node")
    if resolution <= 0.0:
        raise ValueError("resolution must be > 0")
    if method not in ("idw", "bilinear"):
        raise ValueError(f"unknown interpolation method {method!r}")

    rows = max(1, math.ceil((workspace.max.north - workspace.min.north) / resolution))
    cols = max(1, math.ceil((workspace.max.east - workspace.min.east) / resolution))
    pts = np.array([[p.north, p.east] for p, _ in nodes], dtype=float)
    vals = np.array([v for _, v in nodes], dtype=float)

    ci = np.arange(rows) + 0.5
    cj = np.arange(cols) + 0.5
    centers_n = workspace.min.north + ci * resolution
    centers_e = workspace.min.east + cj * resolution
    grid_n, grid_e = np.meshgrid(centers_n, centers_e, indexing="ij")

    if method == "idw" or len(nodes) < 3:
        grid = _idw_grid(grid_n, grid_e, pts, vals)
    else:
        grid = _linear_grid(grid_n, grid_e, pts, vals)
        if grid is None:  # degenerate sample geometry
            grid = _idw_grid(grid_n, grid_e, pts, vals)

    # Cells containing a sample reproduce it exactly (nearest sample to the
    # cell center wins when several share a cell).
    for k in range(len(nodes)):
        i = int((pts[k, 0] - workspace.min.north) / resolution)
        j = int((pts[k, 1] - workspace.min.east) / resolution)
        if 0 <= i < rows and 0 <= j < cols:
            d_new = (pts[k, 0] - grid_n[i, j]) ** 2 + (pts[k, 1] - grid_e[i, j]) ** 2
            prev = _cell_owner.get((i, j))
            if prev is None or d_new < prev[0]:
                _cell_owner[(i, j)] = (d_new, k)
    for (i, j), (_, k) in _cell_owner.items():
        grid[i, j] = vals[k]
    _cell_owner.clear()

    grid = np.clip(grid, 0.0, ceiling)
    return RiskMap(origin=workspace.min, resolution=resolution, values=grid, method=method, ceiling=ceiling)


_cell_owner: Dict[Tuple[int, int], Tuple[float, int]] = {}


def _idw_grid(grid_n: np.ndarray, grid_e: np.ndarray, pts: np.ndarray, vals: np.ndarray) -> np.ndarray:
    dn = grid_n[..., None] - pts[:, 0]
    de = grid_e[..., None] - pts[:, 1]
    d2 = dn * dn + de * de
    exact = d2 < 1e-18
    d2 = np.where(exact, 1.0, d2)
    w = 1.0 / d2
    grid = (w * vals).sum(axis=-1) / w.sum(axis=-1)
    hit = exact.any(axis=-1)
    if hit.any():
        first = exact.argmax(axis=-1)
        grid = np.where(hit, vals[first], grid)
    return grid


def _linear_grid(grid_n, grid_e, pts, vals):
    from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator
    from scipy.spatial import QhullError

    try:
        lin = LinearNDInterpolator(pts, vals)
    except QhullError:
        return None
    grid = lin(grid_n, grid_e)
    if np.isnan(grid).any():
        near = NearestNDInterpolator(pts, vals)
        fill = near(grid_n, grid_e)
        grid = np.where(np.isnan(grid), fill, grid)
    return grid


def sample_risk_map(
    env: EnvironmentState,
    model: RiskModel,
    resolution: float = 4.0,
    method: str = "idw",
) -> RiskMap:
    """Probe the hazard field on a regular lattice and interpolate."""
    ws = env.workspace
    rows = max(2, math.ceil((ws.max.north - ws.min.north) / resolution))
    cols = max(2, math.ceil((ws.max.east - ws.min.east) / resolution))
    nodes = []
    for i in range(rows):
        for j in range(cols):
            p = Point2(
                ws.min.north + (i + 0.5) * resolution,
                ws.min.east + (j + 0.5) * resolution,
            )
            nodes.append((p, hazard_at(p, env, model)))
    return build_risk_map(nodes, ws, resolution=resolution, method=method, ceiling=float(model.n_events))


def risk_map_to_csv(risk_map: RiskMap, destination) -> None:
    """Header row (origin/resolution/shape) followed by the row-major grid."""
    lines = ["origin_north,origin_east,resolution,n_rows,n_cols"]
    lines.append(
        f"{risk_map.origin.north:.6f},{risk_map.origin.east:.6f},"
        f"{risk_map.resolution:.6f},{risk_map.values.shape[0]},{risk_map.values.shape[1]}"
    )
    for row in risk_map.values:
        lines.append(",".join(f"{v:.9e}" for v in row))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def risk_map_to_svg(risk_map: RiskMap, destination, workspace: Optional[Workspace] = None) -> None:
    """Grayscale cell shading, darker = more hazardous."""
    rows, cols = risk_map.values.shape
    if workspace is None:
        workspace = Workspace(
            risk_map.origin,
            Point2(
                risk_map.origin.north + rows * risk_map.resolution,
                risk_map.origin.east + cols * risk_map.resolution,
            ),
        )
    canvas = SvgCanvas(workspace)
    draw_risk_cells(canvas, risk_map)
    canvas.write(destination)


def draw_risk_cells(canvas: SvgCanvas, risk_map: RiskMap) -> None:
    rows, cols = risk_map.values.shape
    res = risk_map.resolution
    for i in range(rows):
        for j in range(cols):
            v = float(risk_map.values[i, j])
            lo = Point2(risk_map.origin.north + i * res, risk_map.origin.east + j * res)
            hi = Point2(lo.north + res, lo.east + res)
            canvas.rect(lo, hi, fill=gray_for(v, risk_map.ceiling))

"""Geometry and analytics over a choreography.

Transition paths are piecewise-linear functions of musical time, where
time is a continuous beat index: beat 0 is the first beat of the first
bar of the first dance and consecutive beats differ by 1.  All functions
here are pure; nothing mutates the choreography.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError
from .model import Choreography, TimelinePosition, Transition

__all__ = [
    "TimedPolyline",
    "CollisionEvent",
    "HeatmapGrid",
    "DistanceReport",
    "beat_index",
    "transition_path",
    "position_at",
    "path_length",
    "transition_progress",
    "distance_report",
    "detect_collisions",
    "heatmap",
    "convex_hull",
]


@dataclass
class TimedPolyline:
    """Vertices of a time-parameterized piecewise-linear path."""

    times: list[float]
    points: list[tuple[float, float]]

    def __post_init__(self):
        if len(self.times) != len(self.points) or len(self.times) < 2:
            raise AnalysisError("INVALID_POLYLINE", "a timed polyline needs matching times and points, at least 2 each")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise AnalysisError("INVALID_POLYLINE", "polyline times must strictly increase")


@dataclass
class CollisionEvent:
    """Closest approach of one entity pair during a transition."""

    entity_a: str
    entity_b: str
    t_closest: float
    min_distance: float
    position_a: tuple[float, float]
    position_b: tuple[float, float]


@dataclass
class HeatmapGrid:
    """Formation-position counts over floor cells (transitions excluded)."""

    cell_size: float
    origin: tuple[float, float]
    counts: np.ndarray  # shape (ny, nx), counts[iy, ix]


@dataclass
class DistanceReport:
    """Path length per entity, per transition and accumulated."""

    per_transition: list[dict[str, float]] = field(default_factory=list)
    accumulated: dict[str, float] = field(default_factory=dict)


def beat_index(choreo: Choreography, position: TimelinePosition) -> int:
    """Linearize a timeline position into a global 0-based beat count."""
    if not 0 <= position.dance_index < len(choreo.dances):
        raise AnalysisError("TIMELINE_OUT_OF_BOUNDS", f"no dance with index {position.dance_index}")
    dance = choreo.dances[position.dance_index]
    if not (1 <= position.bar <= dance.bar_count and 1 <= position.beat <= dance.beats_per_bar):
        raise AnalysisError("TIMELINE_OUT_OF_BOUNDS", f"{position} lies outside dance {dance.name!r}")
    preceding = sum(d.total_beats for d in choreo.dances[: position.dance_index])
    return preceding + (position.bar - 1) * dance.beats_per_bar + (position.beat - 1)


def transition_path(choreo: Choreography, entity_id: str, transition: Transition) -> TimedPolyline:
    """The entity's piecewise-linear path across one transition.

    An entity placed in both adjacent formations moves through its
    waypoints; one placed in only one of them (entering or leaving) holds
    that single position for the whole interval.
    """
    f_from = choreo.formation(transition.from_formation_id)
    f_to = choreo.formation(transition.to_formation_id)
    t0 = float(beat_index(choreo, f_from.timeline_position))
    t1 = float(beat_index(choreo, f_to.timeline_position))

    start = f_from.placements.get(entity_id)
    end = f_to.placements.get(entity_id)
    if start is None and end is None:
        raise AnalysisError("NOT_PLACED", f"entity {entity_id!r} is placed in neither adjacent formation")
    if start is None or end is None:
        held = (start or end).position
        return TimedPolyline([t0, t1], [held, held])

    times = [t0]
    points = [start.position]
    for wp in transition.waypoints.get(entity_id, []):
        times.append(float(beat_index(choreo, wp.time)))
        points.append(wp.position)
    times.append(t1)
    points.append(end.position)
    return TimedPolyline(times, points)


def position_at(path: TimedPolyline, t: float) -> tuple[float, float]:
    """Linear interpolation along the path, clamped outside its time range."""
    times, points = path.times, path.points
    if t <= times[0]:
        return points[0]
    if t >= times[-1]:
        return points[-1]
    i = bisect_right(times, t)
    u = (t - times[i - 1]) / (times[i] - times[i - 1])
    (x0, y0), (x1, y1) = points[i - 1], points[i]
    return (x0 + u * (x1 - x0), y0 + u * (y1 - y0))


def path_length(path: TimedPolyline) -> float:
    """Total Euclidean length of the polyline in meters."""
    return sum(
        math.hypot(x1 - x0, y1 - y0)
        for (x0, y0), (x1, y1) in zip(path.points, path.points[1:])
    )


def transition_progress(path: TimedPolyline, t: float) -> float:
    """Normalized progress in [0, 1]; 0 for a zero-duration transition."""
    start, end = path.times[0], path.times[-1]
    if end <= start:
        return 0.0
    return min(1.0, max(0.0, (t - start) / (end - start)))


def _path_entities(choreo: Choreography, transition: Transition) -> list[str]:
    f_from = choreo.formation(transition.from_formation_id)
    f_to = choreo.formation(transition.to_formation_id)
    return sorted(set(f_from.placements) | set(f_to.placements))


def distance_report(choreo: Choreography) -> DistanceReport:
    """Per-transition and accumulated movement distances per entity."""
    report = DistanceReport(accumulated={e.id: 0.0 for e in choreo.entities})
    for transition in choreo.transitions:
        lengths: dict[str, float] = {}
        for entity_id in _path_entities(choreo, transition):
            meters = path_length(transition_path(choreo, entity_id, transition))
            lengths[entity_id] = meters
            report.accumulated[entity_id] = report.accumulated.get(entity_id, 0.0) + meters
        report.per_transition.append(lengths)
    return report


def _closest_approach(path_a: TimedPolyline, path_b: TimedPolyline) -> tuple[float, float]:
    """Global minimum distance between two co-temporal polylines.

    Both paths span the same interval, so on each piece between
    consecutive breakpoints of either path the relative motion is linear
    and squared distance is a quadratic in t, minimized in closed form.
    Returns (t_closest, min_distance).
    """
    breaks = sorted(set(path_a.times) | set(path_b.times))
    best_t = breaks[0]
    best_d = math.inf
    for ta, tb in zip(breaks, breaks[1:]):
        pa0, pa1 = position_at(path_a, ta), position_at(path_a, tb)
        pb0, pb1 = position_at(path_b, ta), position_at(path_b, tb)
        rx, ry = pa0[0] - pb0[0], pa0[1] - pb0[1]
        span = tb - ta
        vx = ((pa1[0] - pa0[0]) - (pb1[0] - pb0[0])) / span
        vy = ((pa1[1] - pa0[1]) - (pb1[1] - pb0[1])) / span
        v2 = vx * vx + vy * vy
        if v2 <= 1e-18:
            t_star = ta
        else:
            t_star = ta - (rx * vx + ry * vy) / v2
            t_star = min(tb, max(ta, t_star))
        dt = t_star - ta
        d = math.hypot(rx + vx * dt, ry + vy * dt)
        if d < best_d:
            best_d = d
            best_t = t_star
    return best_t, best_d


def detect_collisions(
    choreo: Choreography,
    transition: Transition,
    threshold: float = 0.5,
) -> list[CollisionEvent]:
    """Entity pairs whose spatiotemporal closest approach dips below ``threshold``.

    Crossing the same floor point at different times is not a collision;
    what counts is the minimum over time of the instantaneous distance.
    """
    if threshold <= 0:
        raise AnalysisError("INVALID_THRESHOLD", "collision threshold must be positive")
    entities = _path_entities(choreo, transition)
    paths = {e: transition_path(choreo, e, transition) for e in entities}
    events: list[CollisionEvent] = []
    for i, a in enumerate(entities):
        for b in entities[i + 1 :]:
            t_star, d = _closest_approach(paths[a], paths[b])
            if d < threshold:
                events.append(
                    CollisionEvent(
                        entity_a=a,
                        entity_b=b,
                        t_closest=t_star,
                        min_distance=d,
                        position_a=position_at(paths[a], t_star),
                        position_b=position_at(paths[b], t_star),
                    )
                )
    events.sort(key=lambda e: (e.t_closest, e.entity_a, e.entity_b))
    return events


def heatmap(choreo: Choreography, cell_size: float) -> HeatmapGrid:
    """Count formation placements per floor cell; transitions are ignored.

    The grid covers the floor extended by the margin (the legal placement
    area), cells are half-open with the upper edge folded into the last
    cell, so every placement lands in exactly one cell and the counts sum
    to the number of placements.
    """
    if cell_size <= 0:
        raise AnalysisError("INVALID_CELL_SIZE", "heatmap cell size must be positive")
    floor = choreo.floor
    x0 = -(floor.width / 2 + floor.margin)
    y0 = -(floor.depth / 2 + floor.margin)
    nx = max(1, math.ceil((floor.width + 2 * floor.margin) / cell_size))
    ny = max(1, math.ceil((floor.depth + 2 * floor.margin) / cell_size))
    counts = np.zeros((ny, nx), dtype=int)
    for formation in choreo.formations:
        for pl in formation.placements.values():
            ix = min(nx - 1, int((pl.position[0] - x0) // cell_size))
            iy = min(ny - 1, int((pl.position[1] - y0) // cell_size))
            counts[iy, ix] += 1
    return HeatmapGrid(cell_size=cell_size, origin=(x0, y0), counts=counts)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[float, float]]:
    """Counter-clockwise convex hull via the monotone chain.

    Interior and edge-interior points are excluded; collinear input
    degenerates to its two extreme points.  Starts at the
    lexicographically smallest vertex.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise AnalysisError("TOO_FEW_POINTS", "a hull needs at least 2 points")
    unique = sorted(set(pts))
    if len(unique) <= 2:
        return unique

    lower: list[tuple[float, float]] = []
    for p in unique:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(unique):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]

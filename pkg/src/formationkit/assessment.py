"""Projecting video-derived tracks into floor space and scoring deviations.

The pipeline: bounding-box tracks annotated in video pixels are anchored
at the bottom-center of each box, projected through a planar homography
into floor meters, and compared per frame against the planned position
interpolated from the choreography (the baseline).  Aggregates are
root-mean-square deviations (RMSD) in meters over a selected entity set.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .analysis import TimedPolyline, beat_index, position_at
from .errors import AssessmentError
from .model import Choreography

__all__ = [
    "BoundingBox",
    "Keyframe",
    "Track",
    "TrackSet",
    "VideoMeta",
    "Correspondence",
    "Homography",
    "EntityDeviation",
    "DeviationSample",
    "parse_tracks",
    "serialize_tracks",
    "parse_correspondences",
    "serialize_correspondences",
    "bbox_anchor",
    "track_position",
    "estimate_homography",
    "project",
    "project_points",
    "frame_to_time",
    "BaselineInterpolator",
    "baseline_position",
    "assess",
    "formation_markers",
]


@dataclass
class BoundingBox:
    """Axis-aligned box in video pixels, (x, y) at the top-left corner."""

    x: float
    y: float
    w: float
    h: float


@dataclass
class Keyframe:
    frame: int
    box: BoundingBox


@dataclass
class Track:
    """Keyframed bounding boxes of one entity across the video."""

    entity_id: str
    keyframes: list[Keyframe]

    @property
    def first_frame(self) -> int:
        return self.keyframes[0].frame

    @property
    def last_frame(self) -> int:
        return self.keyframes[-1].frame

    def covers(self, frame: int) -> bool:
        return self.first_frame <= frame <= self.last_frame


@dataclass
class VideoMeta:
    """Frame <-> time mapping: ``frame_offset`` is the frame at time zero."""

    fps: float
    frame_offset: int = 0


@dataclass
class TrackSet:
    """Parsed track document: video metadata plus one track per entity."""

    meta: VideoMeta
    tracks: list[Track]


@dataclass
class Correspondence:
    """One reference point seen both in the video and on the planned floor."""

    video: tuple[float, float]
    floor: tuple[float, float]


@dataclass
class Homography:
    """3x3 video-to-floor projective map, scaled so its largest-magnitude
    element is 1; ``residual`` is the max reprojection error (meters) over
    the correspondences it was estimated from."""

    matrix: np.ndarray
    residual: float = 0.0


@dataclass
class EntityDeviation:
    actual: tuple[float, float]
    planned: tuple[float, float]
    deviation: float


@dataclass
class DeviationSample:
    """Per-frame comparison of danced vs planned positions.

    ``aggregate_rmsd`` is sqrt(mean squared deviation) over the selected
    entities covered by a track at this frame; selected entities without
    coverage are listed in ``missing`` and excluded from the aggregate.
    """

    frame: int
    time: float
    per_entity: dict[str, EntityDeviation] = field(default_factory=dict)
    aggregate_rmsd: float | None = None
    missing: list[str] = field(default_factory=list)


# -- track documents ------------------------------------------------------

def parse_tracks(document: bytes | str, known_entity_ids) -> TrackSet:
    """Parse the XML track file and check it against the choreography.

    Format: ``<tracks video_fps=".." frame_offset="..">`` containing one
    ``<track entity="..">`` per annotated entity, each a list of
    ``<key frame=".." x=".." y=".." w=".." h=".."/>`` with frames
    strictly ascending.
    """
    known = set(known_entity_ids)
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise AssessmentError("MALFORMED_DOCUMENT", f"not well-formed XML: {exc}") from exc
    if root.tag != "tracks":
        raise AssessmentError("MALFORMED_DOCUMENT", f"expected <tracks> root, found <{root.tag}>")

    try:
        fps = float(root.attrib["video_fps"])
        frame_offset = int(root.get("frame_offset", "0"))
    except (KeyError, ValueError) as exc:
        raise AssessmentError("MALFORMED_DOCUMENT", f"bad tracks attributes: {exc}") from exc
    if fps <= 0:
        raise AssessmentError("MALFORMED_DOCUMENT", "video_fps must be positive")

    tracks: list[Track] = []
    seen: set[str] = set()
    for element in root:
        if element.tag != "track":
            raise AssessmentError("MALFORMED_DOCUMENT", f"unexpected element <{element.tag}>")
        entity_id = element.get("entity")
        if not entity_id:
            raise AssessmentError("MALFORMED_DOCUMENT", "<track> without an entity attribute")
        if entity_id not in known:
            raise AssessmentError("UNKNOWN_ENTITY", f"track references unknown entity {entity_id!r}")
        if entity_id in seen:
            raise AssessmentError("MALFORMED_DOCUMENT", f"entity {entity_id!r} has more than one track")
        seen.add(entity_id)

        keyframes: list[Keyframe] = []
        for key in element:
            if key.tag != "key":
                raise AssessmentError("MALFORMED_DOCUMENT", f"unexpected element <{key.tag}> inside track")
            try:
                frame = int(key.attrib["frame"])
                box = BoundingBox(
                    x=float(key.attrib["x"]),
                    y=float(key.attrib["y"]),
                    w=float(key.attrib["w"]),
                    h=float(key.attrib["h"]),
                )
            except (KeyError, ValueError) as exc:
                raise AssessmentError("MALFORMED_DOCUMENT", f"bad key attributes in track {entity_id!r}: {exc}") from exc
            if box.w <= 0 or box.h <= 0:
                raise AssessmentError("MALFORMED_DOCUMENT", f"non-positive box size at frame {frame} of track {entity_id!r}")
            if keyframes and frame <= keyframes[-1].frame:
                raise AssessmentError("NON_MONOTONE_FRAMES", f"frames of track {entity_id!r} must strictly increase")
            keyframes.append(Keyframe(frame, box))
        if not keyframes:
            raise AssessmentError("MALFORMED_DOCUMENT", f"track {entity_id!r} has no keyframes")
        tracks.append(Track(entity_id, keyframes))
    return TrackSet(VideoMeta(fps, frame_offset), tracks)


def serialize_tracks(meta: VideoMeta, tracks: list[Track]) -> bytes:
    """Emit the XML track format parsed by :func:`parse_tracks`."""
    root = ET.Element("tracks", {"video_fps": repr(float(meta.fps)), "frame_offset": str(int(meta.frame_offset))})
    for track in tracks:
        el = ET.SubElement(root, "track", {"entity": track.entity_id})
        for kf in track.keyframes:
            ET.SubElement(
                el,
                "key",
                {
                    "frame": str(int(kf.frame)),
                    "x": repr(float(kf.box.x)),
                    "y": repr(float(kf.box.y)),
                    "w": repr(float(kf.box.w)),
                    "h": repr(float(kf.box.h)),
                },
            )
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def parse_correspondences(document: bytes | str | list) -> list[Correspondence]:
    """Parse the JSON correspondence file: ``[{"video": [u, v], "floor": [x, y]}, ...]``.

    Accepts raw bytes/text or an already-parsed JSON array.
    """
    if isinstance(document, (bytes, str)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise AssessmentError("MALFORMED_DOCUMENT", f"not valid JSON: {exc}") from exc
    else:
        data = document
    if not isinstance(data, list):
        raise AssessmentError("MALFORMED_DOCUMENT", "correspondence document must be a JSON array")
    out: list[Correspondence] = []
    for i, item in enumerate(data):
        try:
            u, v = item["video"]
            x, y = item["floor"]
            out.append(Correspondence((float(u), float(v)), (float(x), float(y))))
        except (TypeError, KeyError, ValueError) as exc:
            raise AssessmentError("MALFORMED_DOCUMENT", f"bad correspondence entry {i}: {exc}") from exc
        if not all(math.isfinite(c) for c in (*out[-1].video, *out[-1].floor)):
            raise AssessmentError("MALFORMED_DOCUMENT", f"non-finite coordinates in entry {i}")
    if len(out) < 4:
        raise AssessmentError("TOO_FEW_POINTS", "at least 4 correspondences are required")
    return out


def serialize_correspondences(correspondences: list[Correspondence]) -> bytes:
    payload = [{"video": list(c.video), "floor": list(c.floor)} for c in correspondences]
    return json.dumps(payload, indent=2).encode()


# -- geometry -------------------------------------------------------------

def bbox_anchor(box: BoundingBox) -> tuple[float, float]:
    """Bottom-center of the box: where the dancer touches the floor."""
    if box.w <= 0 or box.h <= 0:
        raise AssessmentError("INVALID_BOX", "bounding box must have positive width and height")
    return (box.x + box.w / 2.0, box.y + box.h)


def track_position(track: Track, frame: int | float) -> tuple[float, float]:
    """Anchor of the box interpolated at ``frame``, clamped outside the track."""
    frames = [kf.frame for kf in track.keyframes]
    if frame <= frames[0]:
        return bbox_anchor(track.keyframes[0].box)
    if frame >= frames[-1]:
        return bbox_anchor(track.keyframes[-1].box)
    i = bisect_right(frames, frame)
    a, b = track.keyframes[i - 1], track.keyframes[i]
    u = (frame - a.frame) / (b.frame - a.frame)
    box = BoundingBox(
        x=a.box.x + u * (b.box.x - a.box.x),
        y=a.box.y + u * (b.box.y - a.box.y),
        w=a.box.w + u * (b.box.w - a.box.w),
        h=a.box.h + u * (b.box.h - a.box.h),
    )
    return bbox_anchor(box)


def _collinear(p, q, r, tol=1e-9) -> bool:
    area2 = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    scale = max(abs(q[0] - p[0]), abs(q[1] - p[1]), abs(r[0] - p[0]), abs(r[1] - p[1]), 1.0)
    return abs(area2) <= tol * scale * scale


def _normalization(points: np.ndarray) -> np.ndarray:
    """Hartley similarity: centroid to origin, mean distance sqrt(2)."""
    centroid = points.mean(axis=0)
    mean_dist = np.mean(np.linalg.norm(points - centroid, axis=1))
    if mean_dist < 1e-12:
        raise AssessmentError("DEGENERATE_CONFIGURATION", "correspondence points coincide")
    s = math.sqrt(2.0) / mean_dist
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def estimate_homography(
    correspondences: list[Correspondence],
    *,
    max_residual: float = 0.5,
) -> Homography:
    """Estimate the video-to-floor homography by normalized DLT.

    Both point sets are conditioned with a similarity transform, the
    stacked 2n x 9 system is solved for its smallest singular direction,
    and the result is denormalized and scaled so the largest-magnitude
    element is 1.  ``max_residual`` (meters) bounds the acceptable max
    reprojection error over the inputs.
    """
    n = len(correspondences)
    if n < 4:
        raise AssessmentError("TOO_FEW_POINTS", f"homography estimation needs at least 4 correspondences, got {n}")
    video = np.array([c.video for c in correspondences], dtype=float)
    floor = np.array([c.floor for c in correspondences], dtype=float)

    if n == 4:
        for pts, label in ((video, "video"), (floor, "floor")):
            for i in range(4):
                others = [pts[j] for j in range(4) if j != i]
                if _collinear(*others):
                    raise AssessmentError("DEGENERATE_CONFIGURATION", f"3 of the 4 {label} points are collinear")

    t_video = _normalization(video)
    t_floor = _normalization(floor)
    vh = (t_video @ np.column_stack([video, np.ones(n)]).T).T
    fh = (t_floor @ np.column_stack([floor, np.ones(n)]).T).T

    a = np.zeros((2 * n, 9))
    for i in range(n):
        u, v = vh[i, 0], vh[i, 1]
        x, y = fh[i, 0], fh[i, 1]
        a[2 * i] = [-u, -v, -1.0, 0.0, 0.0, 0.0, x * u, x * v, x]
        a[2 * i + 1] = [0.0, 0.0, 0.0, -u, -v, -1.0, y * u, y * v, y]

    _, s, vt = np.linalg.svd(a)
    # A unique solution needs rank 8: the second-smallest singular value
    # must be well away from zero.
    if s[7] / s[0] < 1e-9:
        raise AssessmentError("DEGENERATE_CONFIGURATION", "correspondences do not determine a unique homography")
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_floor) @ h_norm @ t_video
    h = h / h.flat[np.argmax(np.abs(h))]
    if abs(np.linalg.det(h)) <= 1e-12:
        raise AssessmentError("DEGENERATE_CONFIGURATION", "estimated homography is singular")

    reprojected = project_points(h, video)
    residual = float(np.max(np.linalg.norm(reprojected - floor, axis=1)))
    if residual > max_residual:
        raise AssessmentError(
            "ILL_CONDITIONED",
            f"reprojection residual {residual:.3g} m exceeds the {max_residual:.3g} m tolerance",
        )
    return Homography(matrix=h, residual=residual)


def project(homography: Homography | np.ndarray, point: tuple[float, float]) -> tuple[float, float]:
    """Map one video point into floor meters."""
    h = homography.matrix if isinstance(homography, Homography) else np.asarray(homography)
    vec = h @ np.array([point[0], point[1], 1.0])
    if abs(vec[2]) < 1e-12:
        raise AssessmentError("POINT_AT_INFINITY", f"point {point} maps to infinity")
    return (float(vec[0] / vec[2]), float(vec[1] / vec[2]))


def project_points(homography: Homography | np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`project` for an (n, 2) array."""
    h = homography.matrix if isinstance(homography, Homography) else np.asarray(homography)
    pts = np.asarray(points, dtype=float)
    homog = np.column_stack([pts, np.ones(len(pts))]) @ h.T
    w = homog[:, 2]
    if np.any(np.abs(w) < 1e-12):
        raise AssessmentError("POINT_AT_INFINITY", "a point maps to infinity")
    return homog[:, :2] / w[:, None]


def frame_to_time(meta: VideoMeta, frame: int | float) -> float:
    """Seconds of choreography time for a video frame index."""
    if meta.fps <= 0:
        raise AssessmentError("INVALID_META", "fps must be positive")
    return (frame - meta.frame_offset) / meta.fps


# -- baselines ------------------------------------------------------------

class BaselineInterpolator:
    """Planned positions as a function of video time.

    Every formation placement and every waypoint of an entity is an
    anchor in beat space; between two consecutive formations that carry a
    video time, beats are mapped affinely onto the video interval.
    Outside the first/last timestamped formation the baseline clamps.
    """

    def __init__(self, choreo: Choreography):
        stamped = [f for f in choreo.formations if f.video_time is not None]
        if not stamped:
            raise AssessmentError("NO_TIMESTAMPS", "no formation carries a video time")
        self._choreo = choreo
        self._video_times = [float(f.video_time) for f in stamped]
        self._video_beats = [float(beat_index(choreo, f.timeline_position)) for f in stamped]
        self._anchors: dict[str, tuple[list[float], list[tuple[float, float]]]] = {}

    def _entity_anchors(self, entity_id: str) -> tuple[list[float], list[tuple[float, float]]]:
        cached = self._anchors.get(entity_id)
        if cached is not None:
            return cached
        choreo = self._choreo
        times: list[float] = []
        points: list[tuple[float, float]] = []
        for i, f in enumerate(choreo.formations):
            placement = f.placements.get(entity_id)
            if placement is None:
                continue
            if times and i > 0:
                prev = choreo.formations[i - 1]
                if entity_id in prev.placements:
                    transition = choreo.transitions[i - 1]
                    for wp in transition.waypoints.get(entity_id, []):
                        times.append(float(beat_index(choreo, wp.time)))
                        points.append(wp.position)
            times.append(float(beat_index(choreo, f.timeline_position)))
            points.append(placement.position)
        if not times:
            raise AssessmentError("NOT_PLACED", f"entity {entity_id!r} is never placed")
        self._anchors[entity_id] = (times, points)
        return times, points

    def beat_at(self, time_s: float) -> float:
        """Video seconds -> continuous beat index (clamped)."""
        vts, beats = self._video_times, self._video_beats
        if time_s <= vts[0]:
            return beats[0]
        if time_s >= vts[-1]:
            return beats[-1]
        i = bisect_right(vts, time_s)
        u = (time_s - vts[i - 1]) / (vts[i] - vts[i - 1])
        return beats[i - 1] + u * (beats[i] - beats[i - 1])

    def position(self, entity_id: str, time_s: float) -> tuple[float, float]:
        times, points = self._entity_anchors(entity_id)
        if len(times) == 1:
            return points[0]
        return position_at(TimedPolyline(times, points), self.beat_at(time_s))


def baseline_position(choreo: Choreography, entity_id: str, time_s: float) -> tuple[float, float]:
    """Planned floor position of ``entity_id`` at video time ``time_s``."""
    return BaselineInterpolator(choreo).position(entity_id, time_s)


# -- deviation reports ------------------------------------------------------

def assess(
    choreo: Choreography,
    tracks: list[Track],
    homography: Homography,
    meta: VideoMeta,
    selection: list[str] | None = None,
    stride: int = 1,
) -> list[DeviationSample]:
    """Per-frame deviations of tracked entities from the planned baseline.

    Frames run from the first to the last annotated frame in steps of
    ``stride``.  ``selection`` names the entities feeding the aggregate
    RMSD (default: all tracked entities); per-entity deviations are
    always reported for every covered track.
    """
    if stride < 1:
        raise AssessmentError("INVALID_STRIDE", "stride must be at least 1")
    if not tracks:
        raise AssessmentError("MALFORMED_DOCUMENT", "no tracks to assess")
    by_entity = {t.entity_id: t for t in tracks}
    if selection is None:
        selected = sorted(by_entity)
    else:
        selected = list(selection)
        unknown = [e for e in selected if e not in choreo.entity_ids()]
        if unknown:
            raise AssessmentError("UNKNOWN_ENTITY", f"selection references unknown entities {unknown}")

    interp = BaselineInterpolator(choreo)
    first = min(t.first_frame for t in tracks)
    last = max(t.last_frame for t in tracks)

    samples: list[DeviationSample] = []
    for frame in range(first, last + 1, stride):
        time_s = frame_to_time(meta, frame)
        per_entity: dict[str, EntityDeviation] = {}
        for entity_id in sorted(by_entity):
            track = by_entity[entity_id]
            if not track.covers(frame):
                continue
            actual = project(homography, track_position(track, frame))
            planned = interp.position(entity_id, time_s)
            deviation = math.hypot(actual[0] - planned[0], actual[1] - planned[1])
            per_entity[entity_id] = EntityDeviation(actual, planned, deviation)
        missing = [e for e in selected if e not in per_entity]
        squares = [per_entity[e].deviation ** 2 for e in selected if e in per_entity]
        rmsd = math.sqrt(sum(squares) / len(squares)) if squares else None
        samples.append(DeviationSample(frame=frame, time=time_s, per_entity=per_entity, aggregate_rmsd=rmsd, missing=missing))
    return samples


def formation_markers(choreo: Choreography, meta: VideoMeta) -> list[tuple[str, int]]:
    """(formation id, video frame) for every formation with a video time."""
    stamped = [f for f in choreo.formations if f.video_time is not None]
    if not stamped:
        raise AssessmentError("NO_TIMESTAMPS", "no formation carries a video time")
    return [(f.id, round(f.video_time * meta.fps + meta.frame_offset)) for f in stamped]

"""Choreography data model and validation.

Coordinate convention, used everywhere in this package:

* The floor is a ``width x depth`` rectangle of meters with the origin at
  its center.  ``+x`` points to the right as seen from the audience and
  ``+y`` points toward the audience ("front").  Placements may lie inside
  the floor extended by ``margin`` on every side, which is how dancers
  waiting off-floor for their entry are modeled.
* Orientations are degrees in ``[0, 360)`` measured from "facing front"
  (0 deg) turning over the dancer's right shoulder: front -> right ->
  back -> left.  Head orientation is absolute in floor space, not
  relative to the body.

Musical time is addressed by :class:`TimelinePosition`: a 0-based dance
index plus 1-based bar and beat ordinals, ordered lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "SCHEMA_VERSION",
    "SKELETON_JOINTS",
    "POINT_DEFINITIONS",
    "FloorSpec",
    "Entity",
    "Dance",
    "TimelinePosition",
    "Placement",
    "Shape",
    "Pose",
    "Waypoint",
    "Transition",
    "Formation",
    "Choreography",
    "Violation",
    "validate",
    "normalize_angle",
    "timeline_in_bounds",
]

SCHEMA_VERSION = "1.0.0"

#: Joint names a pose may rotate.  Kept deliberately coarse: enough for a
#: stylized figure, stable enough to serialize.
SKELETON_JOINTS = frozenset(
    {
        "head",
        "neck",
        "spine",
        "pelvis",
        "left_shoulder",
        "left_elbow",
        "left_wrist",
        "right_shoulder",
        "right_elbow",
        "right_wrist",
        "left_hip",
        "left_knee",
        "left_ankle",
        "right_hip",
        "right_knee",
        "right_ankle",
    }
)

POINT_DEFINITIONS = ("couple_center", "body_center", "left_foot", "right_foot")
ENTITY_KINDS = ("dancer", "couple")
ENTITY_ROLES = ("lady", "gentleman", "none")

DEFAULT_MAX_COUPLES = 8
DEFAULT_MAX_DANCERS = 16


def normalize_angle(degrees: float) -> float:
    """Map an angle in degrees onto [0, 360)."""
    a = math.fmod(degrees, 360.0)
    if a < 0:
        a += 360.0
    return 0.0 if a == 360.0 else a


@dataclass
class FloorSpec:
    """Metric dance floor: dimensions plus the allowed off-floor band."""

    width: float = 16.0
    depth: float = 16.0
    margin: float = 2.0
    front_direction: str = "+y"

    def contains(self, position: tuple[float, float]) -> bool:
        """True if ``position`` lies on the floor extended by the margin."""
        x, y = position
        return (
            abs(x) <= self.width / 2 + self.margin
            and abs(y) <= self.depth / 2 + self.margin
        )


@dataclass
class Entity:
    """A dancer or a couple placed as a single point on the floor."""

    id: str
    kind: str = "dancer"
    role: str = "none"
    label: str = ""
    member_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.member_ids = tuple(self.member_ids)


@dataclass
class Dance:
    name: str
    bar_count: int
    beats_per_bar: int = 8

    @property
    def total_beats(self) -> int:
        return self.bar_count * self.beats_per_bar


@dataclass(frozen=True, order=True)
class TimelinePosition:
    """Musical address: dance index (0-based), bar and beat (1-based).

    Ordering is lexicographic, so positions compare correctly across
    dance boundaries.
    """

    dance_index: int
    bar: int
    beat: int


@dataclass
class Placement:
    """Where and how one entity stands in a formation."""

    position: tuple[float, float]
    body_orientation: float = 0.0
    head_orientation: float = 0.0
    point_definition: str = "body_center"
    point_dancer: str | None = None
    pose_id: str | None = None

    def __post_init__(self):
        self.position = (float(self.position[0]), float(self.position[1]))


@dataclass
class Shape:
    """A memorization aid: the convex hull of the listed entities."""

    entity_ids: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        self.entity_ids = tuple(self.entity_ids)


@dataclass
class Pose:
    id: str
    joint_rotations: dict[str, tuple[float, float, float]] = field(default_factory=dict)

    def __post_init__(self):
        self.joint_rotations = {
            joint: (float(r[0]), float(r[1]), float(r[2]))
            for joint, r in self.joint_rotations.items()
        }


@dataclass
class Waypoint:
    """A timed intermediate position inside a transition."""

    time: TimelinePosition
    position: tuple[float, float]

    def __post_init__(self):
        self.position = (float(self.position[0]), float(self.position[1]))


@dataclass
class Transition:
    """Per-entity waypoint sequences between two consecutive formations."""

    from_formation_id: str
    to_formation_id: str
    waypoints: dict[str, list[Waypoint]] = field(default_factory=dict)


@dataclass
class Formation:
    """A timestamped snapshot of the whole team."""

    id: str
    name: str
    timeline_position: TimelinePosition
    placements: dict[str, Placement] = field(default_factory=dict)
    shapes: list[Shape] = field(default_factory=list)
    video_time: float | None = None


@dataclass
class Choreography:
    """A complete plan: dances, entities, ordered formations, transitions.

    ``revision`` is a monotonically increasing edit counter used for
    optimistic concurrency by the service layer.
    """

    title: str = "Untitled"
    floor: FloorSpec = field(default_factory=FloorSpec)
    dances: list[Dance] = field(default_factory=list)
    entities: list[Entity] = field(default_factory=list)
    poses: list[Pose] = field(default_factory=list)
    formations: list[Formation] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    revision: int = 0
    schema_version: str = SCHEMA_VERSION

    # -- lookup helpers -------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)

    def entity_ids(self) -> set[str]:
        return {e.id for e in self.entities}

    def formation(self, formation_id: str) -> Formation:
        for f in self.formations:
            if f.id == formation_id:
                return f
        raise KeyError(formation_id)

    def formation_index(self, formation_id: str) -> int:
        for i, f in enumerate(self.formations):
            if f.id == formation_id:
                return i
        raise KeyError(formation_id)

    def transition_after(self, formation_id: str) -> Transition:
        """The transition leaving ``formation_id``."""
        for t in self.transitions:
            if t.from_formation_id == formation_id:
                return t
        raise KeyError(formation_id)

    def pose(self, pose_id: str) -> Pose:
        for p in self.poses:
            if p.id == pose_id:
                return p
        raise KeyError(pose_id)


@dataclass
class Violation:
    """One broken invariant: machine code, human message, document path."""

    code: str
    message: str
    location: str = ""

    def __str__(self):
        return f"{self.code} at {self.location or '/'}: {self.message}"


def timeline_in_bounds(choreo: Choreography, pos: TimelinePosition) -> bool:
    """True if the position addresses an existing dance, bar, and beat."""
    if not 0 <= pos.dance_index < len(choreo.dances):
        return False
    dance = choreo.dances[pos.dance_index]
    return 1 <= pos.bar <= dance.bar_count and 1 <= pos.beat <= dance.beats_per_bar


def validate(
    choreography: Choreography,
    *,
    max_couples: int = DEFAULT_MAX_COUPLES,
    max_dancers: int = DEFAULT_MAX_DANCERS,
) -> list[Violation]:
    """Check every model invariant; returns an empty list iff well-formed.

    Violations are data, not exceptions: editing and persistence both
    route through this single checker.
    """
    v: list[Violation] = []
    c = choreography

    def bad(code, message, location=""):
        v.append(Violation(code, message, location))

    # floor
    if c.floor.width <= 0 or c.floor.depth <= 0:
        bad("INVALID_FLOOR", "floor width and depth must be positive", "/floor")
    if c.floor.margin < 0:
        bad("INVALID_FLOOR", "floor margin must be non-negative", "/floor/margin")

    # dances
    for i, d in enumerate(c.dances):
        if d.bar_count < 1:
            bad("INVALID_DANCE", f"dance {d.name!r} needs at least one bar", f"/dances/{i}/bar_count")
        if d.beats_per_bar < 1:
            bad("INVALID_DANCE", f"dance {d.name!r} needs at least one beat per bar", f"/dances/{i}/beats_per_bar")

    # entities
    ids: set[str] = set()
    dancer_ids: set[str] = set()
    n_dancers = 0
    n_couples = 0
    for i, e in enumerate(c.entities):
        loc = f"/entities/{i}"
        if e.id in ids:
            bad("DUPLICATE_ENTITY_ID", f"entity id {e.id!r} used more than once", loc)
        ids.add(e.id)
        if e.kind not in ENTITY_KINDS:
            bad("INVALID_ENTITY", f"unknown entity kind {e.kind!r}", loc)
        if e.role not in ENTITY_ROLES:
            bad("INVALID_ENTITY", f"unknown entity role {e.role!r}", loc)
        if e.kind == "dancer":
            n_dancers += 1
            dancer_ids.add(e.id)
            if e.member_ids:
                bad("INVALID_ENTITY", "a dancer has no member entities", loc)
        elif e.kind == "couple":
            n_couples += 1
            if len(e.member_ids) != 2:
                bad("INVALID_COUPLE", "a couple must reference exactly 2 dancers", loc)
    for i, e in enumerate(c.entities):
        if e.kind == "couple":
            for m in e.member_ids:
                if m not in dancer_ids:
                    bad("INVALID_COUPLE", f"couple {e.id!r} references unknown dancer {m!r}", f"/entities/{i}")
    if n_dancers > max_dancers:
        bad("TEAM_TOO_LARGE", f"{n_dancers} dancers exceed the limit of {max_dancers}", "/entities")
    if n_couples > max_couples:
        bad("TEAM_TOO_LARGE", f"{n_couples} couples exceed the limit of {max_couples}", "/entities")

    # poses
    pose_ids: set[str] = set()
    for i, p in enumerate(c.poses):
        loc = f"/poses/{i}"
        if p.id in pose_ids:
            bad("DUPLICATE_POSE_ID", f"pose id {p.id!r} used more than once", loc)
        pose_ids.add(p.id)
        for joint, rot in p.joint_rotations.items():
            if joint not in SKELETON_JOINTS:
                bad("UNKNOWN_JOINT", f"pose {p.id!r} rotates unknown joint {joint!r}", loc)
            if not all(math.isfinite(a) for a in rot):
                bad("NON_FINITE_ANGLE", f"pose {p.id!r} has a non-finite rotation for {joint!r}", loc)

    # formations
    formation_ids: set[str] = set()
    entities_by_id = {e.id: e for e in c.entities}
    prev_pos: TimelinePosition | None = None
    prev_video: float | None = None
    for i, f in enumerate(c.formations):
        loc = f"/formations/{i}"
        if f.id in formation_ids:
            bad("DUPLICATE_FORMATION_ID", f"formation id {f.id!r} used more than once", loc)
        formation_ids.add(f.id)

        if not timeline_in_bounds(c, f.timeline_position):
            bad("TIMELINE_OUT_OF_BOUNDS", f"formation {f.id!r} lies outside the dances", f"{loc}/timeline_position")
        if prev_pos is not None:
            if f.timeline_position == prev_pos:
                bad("DUPLICATE_TIMELINE_POSITION", f"formations {c.formations[i - 1].id!r} and {f.id!r} share a timeline position", f"{loc}/timeline_position")
            elif f.timeline_position < prev_pos:
                bad("FORMATION_ORDER", f"formation {f.id!r} is out of timeline order", f"{loc}/timeline_position")
        prev_pos = f.timeline_position

        if f.video_time is not None:
            if prev_video is not None and f.video_time <= prev_video:
                bad("VIDEO_TIME_ORDER", f"video time of formation {f.id!r} does not increase", f"{loc}/video_time")
            prev_video = f.video_time

        for entity_id, pl in f.placements.items():
            ploc = f"{loc}/placements/{entity_id}"
            entity = entities_by_id.get(entity_id)
            if entity is None:
                bad("UNKNOWN_ENTITY", f"placement references unknown entity {entity_id!r}", ploc)
            if not c.floor.contains(pl.position):
                bad("OUT_OF_BOUNDS", f"entity {entity_id!r} placed outside floor + margin", ploc)
            for name in ("body_orientation", "head_orientation"):
                angle = getattr(pl, name)
                if not (0.0 <= angle < 360.0) or not math.isfinite(angle):
                    bad("INVALID_ORIENTATION", f"{name} of {entity_id!r} not normalized to [0, 360)", ploc)
            if pl.point_definition not in POINT_DEFINITIONS:
                bad("INVALID_POINT_DEFINITION", f"unknown point definition {pl.point_definition!r}", ploc)
            elif entity is not None:
                if entity.kind == "couple":
                    if pl.point_definition != "couple_center":
                        if pl.point_dancer is None:
                            bad("MISSING_POINT_DANCER", f"couple {entity_id!r} with point definition {pl.point_definition!r} must name a point dancer", ploc)
                        elif pl.point_dancer not in entity.member_ids:
                            bad("INVALID_POINT_DANCER", f"point dancer {pl.point_dancer!r} is not a member of couple {entity_id!r}", ploc)
                elif pl.point_definition == "couple_center":
                    bad("INVALID_POINT_DEFINITION", f"dancer {entity_id!r} cannot use the couple_center point definition", ploc)
            if pl.pose_id is not None and pl.pose_id not in pose_ids:
                bad("UNKNOWN_POSE", f"placement of {entity_id!r} references unknown pose {pl.pose_id!r}", ploc)

        for j, s in enumerate(f.shapes):
            sloc = f"{loc}/shapes/{j}"
            if len(s.entity_ids) < 2:
                bad("SHAPE_TOO_SMALL", "a shape needs at least 2 entities", sloc)
            for entity_id in s.entity_ids:
                if entity_id not in f.placements:
                    bad("SHAPE_UNPLACED_ENTITY", f"shape references entity {entity_id!r} not placed in formation {f.id!r}", sloc)

    # transitions: exactly one per consecutive formation pair, in order
    expected = [
        (a.id, b.id) for a, b in zip(c.formations, c.formations[1:])
    ]
    actual = [(t.from_formation_id, t.to_formation_id) for t in c.transitions]
    if actual != expected:
        bad(
            "TRANSITION_MISMATCH",
            "transitions must list exactly one record per consecutive formation pair, in order",
            "/transitions",
        )
    else:
        for i, t in enumerate(c.transitions):
            loc = f"/transitions/{i}"
            f_from = c.formations[i]
            f_to = c.formations[i + 1]
            for entity_id, wps in t.waypoints.items():
                wloc = f"{loc}/waypoints/{entity_id}"
                if entity_id not in entities_by_id:
                    bad("UNKNOWN_ENTITY", f"waypoints reference unknown entity {entity_id!r}", wloc)
                prev_wp: TimelinePosition | None = None
                for wp in wps:
                    if not (f_from.timeline_position < wp.time < f_to.timeline_position):
                        bad("WAYPOINT_TIME_OUT_OF_RANGE", f"waypoint of {entity_id!r} is not strictly between the two formations", wloc)
                    elif not timeline_in_bounds(c, wp.time):
                        bad("TIMELINE_OUT_OF_BOUNDS", f"waypoint of {entity_id!r} lies outside the dances", wloc)
                    if prev_wp is not None and not wp.time > prev_wp:
                        bad("WAYPOINT_ORDER", f"waypoint times of {entity_id!r} must strictly increase", wloc)
                    prev_wp = wp.time
                    if not c.floor.contains(wp.position):
                        bad("OUT_OF_BOUNDS", f"waypoint of {entity_id!r} lies outside floor + margin", wloc)

    if c.revision < 0:
        bad("INVALID_REVISION", "revision must be non-negative", "/revision")

    return v

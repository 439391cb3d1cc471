"""Fixture builders and independent oracles shared across the test suite.

The oracles here deliberately avoid the library's own code paths: the
sampling oracle walks a dense time grid with ``np.interp``, the hull
oracle runs the all-pairs half-plane test, and rotations are applied with
an explicit 2x2 matrix.
"""

from __future__ import annotations

import copy
import math

import numpy as np

from formationkit.model import (
    Choreography,
    Dance,
    Entity,
    FloorSpec,
    Formation,
    Placement,
    Pose,
    Shape,
    TimelinePosition,
    Transition,
    Waypoint,
)


def beat_to_timeline(dances: list[Dance], beat: int) -> TimelinePosition:
    """Inverse of beat linearization, kept independent of the library."""
    remaining = beat
    for index, dance in enumerate(dances):
        if remaining < dance.total_beats:
            return TimelinePosition(index, remaining // dance.beats_per_bar + 1, remaining % dance.beats_per_bar + 1)
        remaining -= dance.total_beats
    raise ValueError(f"beat {beat} beyond the last dance")


def basic_choreography(
    n_dancers: int = 4,
    formation_bars: tuple[int, ...] = (1, 5),
    bars: int = 16,
    beats_per_bar: int = 8,
    video_times: tuple[float, ...] | None = None,
) -> Choreography:
    """A deterministic single-dance fixture with evenly spread dancers."""
    dancers = [
        Entity(id=f"d{i + 1}", kind="dancer", role="lady" if i % 2 == 0 else "gentleman", label=f"Dancer {i + 1}")
        for i in range(n_dancers)
    ]
    formations = []
    for j, bar in enumerate(formation_bars):
        placements = {
            d.id: Placement(position=(float(i - (n_dancers - 1) / 2), float(j % 9 - 4)))
            for i, d in enumerate(dancers)
        }
        formations.append(
            Formation(
                id=f"f{j + 1}",
                name=f"Formation {j + 1}",
                timeline_position=TimelinePosition(0, bar, 1),
                placements=placements,
                video_time=video_times[j] if video_times else None,
            )
        )
    transitions = [Transition(a.id, b.id) for a, b in zip(formations, formations[1:])]
    return Choreography(
        title="Fixture",
        floor=FloorSpec(16.0, 16.0, 2.0),
        dances=[Dance("Samba", bars, beats_per_bar)],
        entities=dancers,
        formations=formations,
        transitions=transitions,
    )


def crossing_choreography() -> Choreography:
    """Two dancers whose straight-line paths meet at the same moment."""
    choreo = basic_choreography(n_dancers=2, formation_bars=(1, 2))
    f1, f2 = choreo.formations
    f1.placements["d1"].position = (0.0, 0.0)
    f1.placements["d2"].position = (1.0, -1.0)
    f2.placements["d1"].position = (2.0, 0.0)
    f2.placements["d2"].position = (1.0, 1.0)
    return choreo


def random_choreography(
    rng: np.random.Generator,
    *,
    n_dancers: int | None = None,
    n_formations: int | None = None,
    with_couples: bool = True,
    with_video: bool = False,
    max_waypoints: int = 2,
) -> Choreography:
    """A randomized choreography that satisfies every model invariant."""
    floor = FloorSpec(
        width=float(rng.uniform(10, 20)),
        depth=float(rng.uniform(10, 20)),
        margin=float(rng.uniform(0, 3)),
    )
    dances = [
        Dance(f"Dance {i}", int(rng.integers(4, 24)), int(rng.choice([4, 8])))
        for i in range(int(rng.integers(1, 3)))
    ]
    total_beats = sum(d.total_beats for d in dances)

    if n_dancers is None:
        n_dancers = int(rng.integers(2, 9))
    entities = [
        Entity(id=f"d{i + 1}", kind="dancer", role=str(rng.choice(["lady", "gentleman", "none"])), label=f"Dancer {i + 1}")
        for i in range(n_dancers)
    ]
    if with_couples and n_dancers >= 2 and rng.random() < 0.5:
        entities.append(Entity(id="c1", kind="couple", role="none", label="Couple 1", member_ids=("d1", "d2")))

    poses = []
    if rng.random() < 0.4:
        poses.append(Pose(id="p1", joint_rotations={"head": (float(rng.uniform(-90, 90)), 0.0, 0.0)}))

    if n_formations is None:
        n_formations = int(rng.integers(2, 6))
    n_formations = min(n_formations, total_beats)
    # leave room for interior waypoint beats by spacing formations out
    stride = max(1, total_beats // n_formations)
    beats = list(range(0, stride * n_formations, stride))

    def random_point():
        return (
            float(rng.uniform(-floor.width / 2 - floor.margin, floor.width / 2 + floor.margin)),
            float(rng.uniform(-floor.depth / 2 - floor.margin, floor.depth / 2 + floor.margin)),
        )

    formations = []
    video_time = float(rng.uniform(0, 3))
    for j, beat in enumerate(beats):
        placements = {}
        for e in entities:
            if rng.random() < 0.85:
                if e.kind == "couple":
                    point_definition = str(rng.choice(["couple_center", "left_foot", "right_foot"]))
                    point_dancer = str(rng.choice(e.member_ids)) if point_definition != "couple_center" else None
                else:
                    point_definition = str(rng.choice(["body_center", "left_foot", "right_foot"]))
                    point_dancer = None
                placements[e.id] = Placement(
                    position=random_point(),
                    body_orientation=float(rng.uniform(0, 360)) % 360.0,
                    head_orientation=float(rng.uniform(0, 360)) % 360.0,
                    point_definition=point_definition,
                    point_dancer=point_dancer,
                    pose_id="p1" if poses and rng.random() < 0.3 else None,
                )
        shapes = []
        placed = sorted(placements)
        if len(placed) >= 3 and rng.random() < 0.3:
            chosen = rng.choice(placed, size=3, replace=False)
            shapes.append(Shape(tuple(str(s) for s in chosen), label="line"))
        formations.append(
            Formation(
                id=f"f{j + 1}",
                name=f"F{j + 1}",
                timeline_position=beat_to_timeline(dances, beat),
                placements=placements,
                shapes=shapes,
                video_time=round(video_time, 3) if with_video else None,
            )
        )
        video_time += float(rng.uniform(2, 8))

    transitions = []
    for a, b, beat_a, beat_b in zip(formations, formations[1:], beats, beats[1:]):
        waypoints = {}
        interior = list(range(beat_a + 1, beat_b))
        movers = [e for e in a.placements if e in b.placements]
        for entity_id in movers:
            count = int(rng.integers(0, max_waypoints + 1))
            count = min(count, len(interior))
            if count:
                chosen = sorted(rng.choice(interior, size=count, replace=False))
                waypoints[entity_id] = [
                    Waypoint(time=beat_to_timeline(dances, int(t)), position=random_point())
                    for t in chosen
                ]
        transitions.append(Transition(a.id, b.id, waypoints))

    return Choreography(
        title=f"Random {rng.integers(1e6)}",
        floor=floor,
        dances=dances,
        entities=entities,
        poses=poses,
        formations=formations,
        transitions=transitions,
        revision=int(rng.integers(0, 5)),
    )


# -- oracles ----------------------------------------------------------------

def _sample_grid(times_a, times_b, step: float) -> np.ndarray:
    """Uniform grid of at most ``step`` beats plus both vertex time sets.

    Including the vertices matters: at a kink the distance-over-time
    curve is not smooth, so a uniform grid alone is off by O(step) there
    instead of O(step^2).
    """
    t0 = min(times_a[0], times_b[0])
    t1 = max(times_a[-1], times_b[-1])
    n = max(1, math.ceil((t1 - t0) / step))
    return np.union1d(np.linspace(t0, t1, n + 1), np.array(list(times_a) + list(times_b)))


def sampled_closest_approach(path_a, path_b, step: float = 1e-3) -> tuple[float, float]:
    """Dense-sampling minimum distance between two timed polylines."""
    ts = _sample_grid(path_a.times, path_b.times, step)
    ax = np.interp(ts, path_a.times, [p[0] for p in path_a.points])
    ay = np.interp(ts, path_a.times, [p[1] for p in path_a.points])
    bx = np.interp(ts, path_b.times, [p[0] for p in path_b.points])
    by = np.interp(ts, path_b.times, [p[1] for p in path_b.points])
    d = np.hypot(ax - bx, ay - by)
    i = int(np.argmin(d))
    return float(ts[i]), float(d[i])


def sampled_all_pairs_min(paths: dict, step: float = 1e-3) -> dict:
    """Vectorized oracle: {(a, b): (t_min, d_min)} for every unordered pair."""
    names = sorted(paths)
    all_times = sorted({t for p in paths.values() for t in p.times})
    ts = _sample_grid(all_times, all_times, step)
    coords = {}
    for name in names:
        p = paths[name]
        coords[name] = (
            np.interp(ts, p.times, [q[0] for q in p.points]),
            np.interp(ts, p.times, [q[1] for q in p.points]),
        )
    out = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            d = np.hypot(coords[a][0] - coords[b][0], coords[a][1] - coords[b][1])
            k = int(np.argmin(d))
            out[(a, b)] = (float(ts[k]), float(d[k]))
    return out


def realistic_transition_choreography(
    rng: np.random.Generator,
    n_dancers: int = 16,
    max_waypoints: int = 3,
) -> Choreography:
    """One transition with dance-plausible speeds (about 1 m per beat).

    Start positions are uniform, displacements capped at 4 m, and
    waypoints detour at most 0.4 m from the straight chord at widely
    spaced interior beats, so per-segment relative speeds stay bounded
    and a dense sampling oracle at 1e-3-beat steps resolves minima to
    well under a millimeter.
    """
    interval = int(rng.choice([8, 16, 24, 32]))
    choreo = basic_choreography(
        n_dancers=n_dancers, formation_bars=(1, 1 + interval // 8), bars=max(8, interval // 8 + 2), beats_per_bar=8
    )
    f1, f2 = choreo.formations
    bound = choreo.floor.width / 2 + choreo.floor.margin - 0.5
    targets = {}
    for e in list(f1.placements):
        start = rng.uniform(-bound, bound, size=2)
        delta = rng.uniform(-1, 1, size=2)
        delta *= rng.uniform(0, 4.0) / (np.linalg.norm(delta) + 1e-9)
        end = np.clip(start + delta, -bound, bound)
        f1.placements[e].position = (float(start[0]), float(start[1]))
        f2.placements[e].position = (float(end[0]), float(end[1]))
        targets[e] = (start, end)

    candidates = [interval // 4, interval // 2, 3 * interval // 4]
    transition = choreo.transitions[0]
    for e, (start, end) in targets.items():
        count = int(rng.integers(0, max_waypoints + 1))
        if not count:
            continue
        beats = sorted(rng.choice(candidates, size=min(count, len(candidates)), replace=False))
        waypoints = []
        for beat in beats:
            frac = beat / interval
            chord = start + frac * (end - start)
            detour = rng.uniform(-1, 1, size=2)
            detour *= rng.uniform(0, 0.4) / (np.linalg.norm(detour) + 1e-9)
            pos = np.clip(chord + detour, -bound, bound)
            waypoints.append(
                Waypoint(
                    time=beat_to_timeline(choreo.dances, int(beat)),
                    position=(float(pos[0]), float(pos[1])),
                )
            )
        transition.waypoints[e] = waypoints
    return choreo


def cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def brute_force_hull_vertices(points) -> set[tuple[float, float]]:
    """Hull vertex set by the all-pairs half-plane test (general position)."""
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    vertices: set[tuple[float, float]] = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if all(cross(pts[i], pts[j], pts[k]) > 0 for k in range(n) if k != i and k != j):
                vertices.add(pts[i])
                vertices.add(pts[j])
    return vertices


def synthetic_camera(rng: np.random.Generator) -> np.ndarray:
    """Random floor-to-video projective matrix with mild perspective.

    Scale, rotation, and principal point vary; the perspective row is
    small enough that w stays positive over floor + margin.
    """
    f = rng.uniform(40, 120)  # pixels per meter
    angle = rng.uniform(-math.pi, math.pi)
    c, s = math.cos(angle), math.sin(angle)
    cx, cy = rng.uniform(700, 1200), rng.uniform(400, 700)
    p1, p2 = rng.uniform(-2e-3, 2e-3, size=2)
    return np.array(
        [
            [f * c, -f * s, cx],
            [f * s, f * c, cy],
            [p1, p2, 1.0],
        ]
    )


def project_oracle(matrix, point) -> tuple[float, float]:
    """Homogeneous multiply written out by hand."""
    m = np.asarray(matrix)
    x = m[0, 0] * point[0] + m[0, 1] * point[1] + m[0, 2]
    y = m[1, 0] * point[0] + m[1, 1] * point[1] + m[1, 2]
    w = m[2, 0] * point[0] + m[2, 1] * point[1] + m[2, 2]
    return (x / w, y / w)


def spread_video_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """n well-spread video points: a jittered ring around the frame center.

    Points near a circle keep every triple far from collinear, so the
    construction never produces a degenerate correspondence set.
    """
    angles = np.linspace(0, 2 * math.pi, n, endpoint=False) + rng.uniform(-0.2, 0.2, size=n)
    radii = rng.uniform(300, 450, size=n)
    return np.column_stack(
        [960 + radii * np.cos(angles), 540 + radii * np.sin(angles)]
    )


def rotate_point(point, degrees, center=(0.0, 0.0)) -> tuple[float, float]:
    """Independent 2x2 rotation (counter-clockwise in x/y axes)."""
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    dx, dy = point[0] - center[0], point[1] - center[1]
    return (center[0] + c * dx - s * dy, center[1] + s * dx + c * dy)


def synthetic_performance(
    seed: int = 0,
    n_dancers: int = 16,
    n_formations: int = 10,
    fps: float = 25.0,
    sigma: float = 0.0,
    seconds_per_formation: float = 6.0,
):
    """A full synthetic pipeline: choreography, annotated tracks, references.

    Ground-truth trajectories follow the planned baseline; per-frame
    Gaussian noise of ``sigma`` meters per axis is added in floor space
    before projecting into pixels, so recovered deviations equal the
    injected noise magnitudes.  Returns a dict with document bytes and
    the underlying objects.
    """
    from formationkit.assessment import (
        BaselineInterpolator,
        BoundingBox,
        Correspondence,
        Keyframe,
        Track,
        VideoMeta,
        serialize_correspondences,
        serialize_tracks,
    )
    from formationkit.persistence import save

    rng = np.random.default_rng(seed)
    bars = tuple(range(1, 2 * n_formations, 2))
    choreo = basic_choreography(n_dancers=n_dancers, formation_bars=bars, bars=2 * n_formations + 2)
    for j, f in enumerate(choreo.formations):
        f.video_time = seconds_per_formation * j

    # bounded random walk keeps speeds dance-plausible
    positions = {e.id: rng.uniform(-7, 7, size=2) for e in choreo.entities}
    for f in choreo.formations:
        for e in list(f.placements):
            step = rng.uniform(-1, 1, size=2)
            step *= rng.uniform(0, 3.0) / (np.linalg.norm(step) + 1e-9)
            positions[e] = np.clip(positions[e] + step, -7, 7)
            f.placements[e].position = (float(positions[e][0]), float(positions[e][1]))

    for i, transition in enumerate(choreo.transitions):
        f_from = choreo.formations[i]
        f_to = choreo.formations[i + 1]
        mid_bar = f_from.timeline_position.bar + 1
        for e in sorted(f_from.placements):
            if e in f_to.placements and rng.random() < 0.3:
                a = np.array(f_from.placements[e].position)
                b = np.array(f_to.placements[e].position)
                detour = rng.uniform(-0.5, 0.5, size=2)
                pos = np.clip((a + b) / 2 + detour, -7.5, 7.5)
                transition.waypoints[e] = [
                    Waypoint(
                        time=TimelinePosition(0, mid_bar, 1),
                        position=(float(pos[0]), float(pos[1])),
                    )
                ]

    camera = synthetic_camera(rng)
    meta = VideoMeta(fps=fps, frame_offset=0)
    interp = BaselineInterpolator(choreo)
    n_frames = round(choreo.formations[-1].video_time * fps) + 1
    tracks = []
    for e in sorted(choreo.entity_ids()):
        keyframes = []
        for frame in range(n_frames):
            planned = np.array(interp.position(e, frame / fps))
            actual = planned + rng.normal(0.0, sigma, size=2) if sigma else planned
            u, v = project_oracle(camera, actual)
            keyframes.append(Keyframe(frame, BoundingBox(u - 20.0, v - 80.0, 40.0, 80.0)))
        tracks.append(Track(e, keyframes))

    floor_refs = [(-8.0, -8.0), (8.0, -8.0), (8.0, 8.0), (-8.0, 8.0), (0.0, 6.0), (-6.0, 0.0), (6.0, -3.0), (3.0, 3.0)]
    correspondences = [Correspondence(project_oracle(camera, p), p) for p in floor_refs]

    return {
        "choreography": choreo,
        "choreography_bytes": save(choreo),
        "tracks_bytes": serialize_tracks(meta, tracks),
        "correspondences_bytes": serialize_correspondences(correspondences),
        "camera": camera,
        "meta": meta,
        "n_frames": n_frames,
        "tracks": tracks,
    }


def rotate_choreography(choreo: Choreography, degrees: float) -> Choreography:
    """Rigidly rotate every placement and waypoint about the floor center."""
    out = copy.deepcopy(choreo)
    for f in out.formations:
        for pl in f.placements.values():
            pl.position = rotate_point(pl.position, degrees)
    for t in out.transitions:
        for wps in t.waypoints.values():
            for wp in wps:
                wp.position = rotate_point(wp.position, degrees)
    return out

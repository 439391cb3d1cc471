"""Assess a (synthetic) performance video against its plan, end to end.

A choreography with video timestamps is danced by simulated dancers who
wander a bit around their planned trajectories; bounding boxes are
annotated in pixel space through a synthetic camera, and the assessment
pipeline recovers the deviations: tracks -> bottom-center anchors ->
homography projection -> per-frame RMSD against the interpolated plan.

Run:  python demos/assess_performance.py
"""

import numpy as np

from formationkit import Dance, Entity, FloorSpec, Choreography, validate
from formationkit.assessment import (
    BaselineInterpolator,
    BoundingBox,
    Correspondence,
    Keyframe,
    Track,
    VideoMeta,
    assess,
    estimate_homography,
    formation_markers,
)
from formationkit.editing import create_formation
from formationkit.model import TimelinePosition
from formationkit.persistence import export_report

rng = np.random.default_rng(7)

# -- 1. a plan with video timestamps -------------------------------------------

team = [Entity(id=f"d{i + 1}", kind="dancer", label=f"Dancer {i + 1}") for i in range(8)]
choreo = Choreography(
    title="Assessed demo",
    floor=FloorSpec(16.0, 16.0, 2.0),
    dances=[Dance("Rumba", bar_count=16, beats_per_bar=8)],
    entities=team,
)
choreo, f1 = create_formation(choreo, TimelinePosition(0, 1, 1), template="diamond_of_8")
choreo, f2 = create_formation(choreo, TimelinePosition(0, 5, 1), template="diagonal_of_8")
choreo, f3 = create_formation(choreo, TimelinePosition(0, 9, 1), duplicate_of=f1)
for formation, seconds in zip(choreo.formations, (0.0, 8.0, 16.0)):
    formation.video_time = seconds
assert validate(choreo) == []

# -- 2. a synthetic camera and the "performance" ---------------------------------

camera = np.array([[90.0, -12.0, 960.0], [10.0, 75.0, 540.0], [1.5e-3, -1e-3, 1.0]])  # floor -> pixels


def to_pixels(p):
    v = camera @ np.array([p[0], p[1], 1.0])
    return v[0] / v[2], v[1] / v[2]


meta = VideoMeta(fps=25.0, frame_offset=0)
baseline = BaselineInterpolator(choreo)
n_frames = int(choreo.formations[-1].video_time * meta.fps) + 1

tracks = []
for e in sorted(choreo.entity_ids()):
    keyframes = []
    wobble = rng.normal(0.0, 0.25, size=2)  # systematic per-dancer drift
    for frame in range(n_frames):
        planned = np.array(baseline.position(e, frame / meta.fps))
        danced = planned + wobble + rng.normal(0.0, 0.1, size=2)
        u, v = to_pixels(danced)
        keyframes.append(Keyframe(frame, BoundingBox(u - 25.0, v - 90.0, 50.0, 90.0)))
    tracks.append(Track(e, keyframes))

# -- 3. estimate the homography from the floor corners ------------------------------

floor_refs = [(-8.0, -8.0), (8.0, -8.0), (8.0, 8.0), (-8.0, 8.0)]
homography = estimate_homography([Correspondence(to_pixels(p), p) for p in floor_refs])
print(f"homography residual on the reference points: {homography.residual:.2e} m")

# -- 4. assess and summarize -----------------------------------------------------------

samples = assess(choreo, tracks, homography, meta)
rmsd = np.array([s.aggregate_rmsd for s in samples])
print(f"{len(samples)} frames assessed; RMSD mean {rmsd.mean():.3f} m, worst {rmsd.max():.3f} m")

markers = formation_markers(choreo, meta)
for fid, frame in markers:
    print(f"  formation {fid} at frame {frame}: RMSD {samples[frame].aggregate_rmsd:.3f} m")

worst_sample = samples[int(rmsd.argmax())]
worst_entity = max(worst_sample.per_entity, key=lambda e: worst_sample.per_entity[e].deviation)
dev = worst_sample.per_entity[worst_entity]
print(
    f"worst moment: frame {worst_sample.frame} ({worst_sample.time:.2f} s), "
    f"{worst_entity} off by {dev.deviation:.2f} m "
    f"(danced {tuple(round(c, 2) for c in dev.actual)}, planned {tuple(round(c, 2) for c in dev.planned)})"
)

csv_report = export_report(samples, markers, meta, "csv")
print(f"\nCSV report: {len(csv_report.splitlines()) - 1} rows")

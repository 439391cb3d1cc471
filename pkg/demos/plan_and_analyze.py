"""Plan a small choreography and run every analysis over it.

Builds a team of 16 dancers, lays out formations from templates, edits
placements and waypoints, then prints movement distances, collision
warnings, and the floor-utilization heatmap.

Run:  python demos/plan_and_analyze.py
"""

import numpy as np

from formationkit import Choreography, Dance, Entity, FloorSpec, validate
from formationkit.analysis import detect_collisions, distance_report, heatmap, transition_path, path_length
from formationkit.editing import create_formation, move_entity, rotate_selection, set_waypoint
from formationkit.model import TimelinePosition
from formationkit.persistence import save

# -- 1. an empty choreography with a 16-dancer team ------------------------

team = [
    Entity(id=f"d{i + 1}", kind="dancer", role="lady" if i % 2 == 0 else "gentleman", label=f"Dancer {i + 1}")
    for i in range(16)
]
choreo = Choreography(
    title="Demo choreography",
    floor=FloorSpec(width=16.0, depth=16.0, margin=2.0),
    dances=[Dance("Samba", bar_count=32, beats_per_bar=8), Dance("Jive", bar_count=24, beats_per_bar=8)],
    entities=team,
)

# -- 2. formations from templates, then individual edits --------------------

choreo, f1 = create_formation(choreo, TimelinePosition(0, 1, 1), template="two_lines_of_8")
choreo, f2 = create_formation(choreo, TimelinePosition(0, 9, 1), template="diamond_of_8")
choreo, f3 = create_formation(choreo, TimelinePosition(0, 17, 1), duplicate_of=f1)
choreo, f4 = create_formation(choreo, TimelinePosition(1, 1, 1), template="four_lines_of_4")

# nudge one dancer and rotate the front line of the duplicated formation
choreo = move_entity(choreo, f3, "d1", (-6.0, 3.0))
front_line = [f"d{i + 1}" for i in range(8)]
choreo = rotate_selection(choreo, f3, front_line, 12.0)

# shape one transition with a waypoint: d1 swings wide to avoid traffic
choreo = set_waypoint(choreo, f1, "d1", TimelinePosition(0, 5, 1), (-7.5, 0.0))

assert validate(choreo) == [], "every edit keeps the model valid"
print(f"built {len(choreo.formations)} formations, document is {len(save(choreo))} bytes\n")

# -- 3. movement distances ----------------------------------------------------

report = distance_report(choreo)
print("accumulated movement per dancer (top 5):")
for entity_id, meters in sorted(report.accumulated.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {entity_id:>4}  {meters:6.2f} m")

longest = max(report.per_transition[0], key=report.per_transition[0].get)
path = transition_path(choreo, longest, choreo.transitions[0])
print(f"\nlongest first-transition path: {longest} walks {path_length(path):.2f} m through {len(path.points)} vertices")

# -- 4. collision check --------------------------------------------------------

print("\ncollision events (threshold 0.5 m):")
for transition in choreo.transitions:
    for event in detect_collisions(choreo, transition, threshold=0.5):
        print(
            f"  {transition.from_formation_id}->{transition.to_formation_id}: "
            f"{event.entity_a} and {event.entity_b} close to {event.min_distance:.2f} m "
            f"at beat {event.t_closest:.1f}"
        )

# -- 5. floor utilization -------------------------------------------------------

grid = heatmap(choreo, cell_size=2.0)
print(f"\nfloor utilization ({grid.counts.sum()} placements, 2 m cells, front at the top):")
for row in np.flipud(grid.counts):
    print("  " + "".join(f"{c:3d}" if c else "  ." for c in row))

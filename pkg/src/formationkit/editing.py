"""Editing operations over choreography snapshots.

Every operation takes a :class:`~formationkit.model.Choreography` value,
leaves it untouched, and returns an edited deep copy; a rejected edit
raises :class:`~formationkit.errors.EditError` before anything is
returned, so edits are atomic by construction.  Revision bookkeeping is
deliberately not done here: the service layer increments the revision
counter when it accepts a mutation.
"""

from __future__ import annotations

import copy
import json
import math
import re
from importlib import resources
from pathlib import Path

from .errors import EditError
from .model import (
    Choreography,
    Formation,
    Placement,
    TimelinePosition,
    Transition,
    Waypoint,
    normalize_angle,
    timeline_in_bounds,
)

__all__ = [
    "create_formation",
    "move_entity",
    "select_brush",
    "rotate_selection",
    "set_orientation",
    "reposition_on_timeline",
    "set_waypoint",
    "remove_waypoint",
    "list_templates",
    "load_template",
]


def _require_formation(choreo: Choreography, formation_id: str) -> Formation:
    try:
        return choreo.formation(formation_id)
    except KeyError:
        raise EditError("UNKNOWN_FORMATION", f"no formation with id {formation_id!r}") from None


def _require_in_bounds(choreo: Choreography, position: tuple[float, float]) -> None:
    if not choreo.floor.contains(position):
        raise EditError("OUT_OF_BOUNDS", f"position {position} lies outside floor + margin")


def _next_formation_id(choreo: Choreography) -> str:
    highest = 0
    for f in choreo.formations:
        m = re.fullmatch(r"f(\d+)", f.id)
        if m:
            highest = max(highest, int(m.group(1)))
    return f"f{highest + 1}"


# -- templates ----------------------------------------------------------
#
# Templates are data files, not code.  Each file holds a list of slots in
# floor fractions: a row of n dancers spans the width at x = width *
# (i - (n-1)/2) / n, so 8 dancers on a 16 m floor stand 2 m apart; rows
# sit at y = +/- depth/8.  Teams can drop their own files next to the
# built-in ones via ``template_dirs``.

def _builtin_template_dir():
    return resources.files("formationkit").joinpath("templates")


def list_templates(template_dirs: list[str | Path] | None = None) -> list[str]:
    names = {p.name[: -len(".json")] for p in _builtin_template_dir().iterdir() if p.name.endswith(".json")}
    for d in template_dirs or []:
        names.update(p.stem for p in Path(d).glob("*.json"))
    return sorted(names)


def load_template(name: str, template_dirs: list[str | Path] | None = None) -> dict:
    """Load a template definition by name; user directories shadow built-ins."""
    for d in template_dirs or []:
        candidate = Path(d) / f"{name}.json"
        if candidate.exists():
            return json.loads(candidate.read_text())
    builtin = _builtin_template_dir().joinpath(f"{name}.json")
    if builtin.is_file():
        return json.loads(builtin.read_text())
    raise EditError("UNKNOWN_TEMPLATE", f"no formation template named {name!r}")


def _template_placements(choreo: Choreography, template_name: str, template_dirs) -> dict[str, Placement]:
    spec = load_template(template_name, template_dirs)
    slots = spec["slots"]
    dancers = [e for e in choreo.entities if e.kind == "dancer"]
    if len(dancers) < len(slots):
        raise EditError(
            "TEMPLATE_TOO_FEW_ENTITIES",
            f"template {template_name!r} needs {len(slots)} dancers, choreography has {len(dancers)}",
        )
    placements = {}
    for entity, slot in zip(dancers, slots):
        placements[entity.id] = Placement(
            position=(slot["x"] * choreo.floor.width, slot["y"] * choreo.floor.depth),
        )
    return placements


# -- operations ---------------------------------------------------------

def create_formation(
    choreo: Choreography,
    timeline_position: TimelinePosition,
    *,
    duplicate_of: str | None = None,
    template: str | None = None,
    name: str = "",
    template_dirs: list[str | Path] | None = None,
) -> tuple[Choreography, str]:
    """Insert a new formation, keeping formations ordered by timeline.

    The formation starts blank unless ``duplicate_of`` names a formation
    to copy (placements, shapes, pose references) or ``template`` names a
    formation template.  Neighbor transitions are created with empty
    waypoints; a transition split by the insertion loses its waypoints
    because its endpoints no longer exist as a pair.
    """
    if duplicate_of is not None and template is not None:
        raise EditError("INVALID_SOURCE", "duplicate_of and template are mutually exclusive")
    if not timeline_in_bounds(choreo, timeline_position):
        raise EditError("TIMELINE_OUT_OF_BOUNDS", f"{timeline_position} lies outside the dances")
    if any(f.timeline_position == timeline_position for f in choreo.formations):
        raise EditError("POSITION_OCCUPIED", f"a formation already sits at {timeline_position}")

    if duplicate_of is not None:
        source = _require_formation(choreo, duplicate_of)
        placements = copy.deepcopy(source.placements)
        shapes = copy.deepcopy(source.shapes)
        name = name or source.name
    elif template is not None:
        placements = _template_placements(choreo, template, template_dirs)
        shapes = []
        name = name or template
    else:
        placements, shapes = {}, []

    out = copy.deepcopy(choreo)
    new = Formation(
        id=_next_formation_id(choreo),
        name=name,
        timeline_position=timeline_position,
        placements=placements,
        shapes=shapes,
    )
    index = sum(1 for f in out.formations if f.timeline_position < timeline_position)
    out.formations.insert(index, new)

    # Rebuild the transition chain around the insertion point.
    transitions: list[Transition] = []
    for a, b in zip(out.formations, out.formations[1:]):
        existing = next(
            (t for t in out.transitions if t.from_formation_id == a.id and t.to_formation_id == b.id),
            None,
        )
        transitions.append(existing if existing is not None else Transition(a.id, b.id))
    out.transitions = transitions
    return out, new.id


def move_entity(
    choreo: Choreography,
    formation_id: str,
    entity_id: str,
    position: tuple[float, float],
) -> Choreography:
    """Drag one placed entity to a new floor position."""
    formation = _require_formation(choreo, formation_id)
    if entity_id not in choreo.entity_ids():
        raise EditError("UNKNOWN_ENTITY", f"no entity with id {entity_id!r}")
    if entity_id not in formation.placements:
        raise EditError("NOT_PLACED", f"entity {entity_id!r} is not placed in formation {formation_id!r}")
    _require_in_bounds(choreo, position)

    out = copy.deepcopy(choreo)
    out.formation(formation_id).placements[entity_id].position = (float(position[0]), float(position[1]))
    return out


def select_brush(
    formation: Formation,
    rect: tuple[tuple[float, float], tuple[float, float]],
) -> set[str]:
    """Entities whose positions lie inside or on the given rectangle."""
    (x1, y1), (x2, y2) = rect
    if x1 > x2 or y1 > y2:
        raise ValueError("brush rectangle must be (min corner, max corner)")
    return {
        entity_id
        for entity_id, pl in formation.placements.items()
        if x1 <= pl.position[0] <= x2 and y1 <= pl.position[1] <= y2
    }


def rotate_selection(
    choreo: Choreography,
    formation_id: str,
    entity_ids,
    degrees: float,
) -> Choreography:
    """Rotate the selected placements about their common centroid.

    Positive angles turn toward the dancer's right (front -> right ->
    back), matching how orientation angles are measured, so a rotated
    line keeps facing along itself.  Rejected atomically if any rotated
    position would leave floor + margin.
    """
    formation = _require_formation(choreo, formation_id)
    selection = list(entity_ids)
    if not selection:
        raise EditError("EMPTY_SELECTION", "rotation needs at least one entity")
    for entity_id in selection:
        if entity_id not in formation.placements:
            raise EditError("NOT_PLACED", f"entity {entity_id!r} is not placed in formation {formation_id!r}")

    cx = sum(formation.placements[e].position[0] for e in selection) / len(selection)
    cy = sum(formation.placements[e].position[1] for e in selection) / len(selection)
    rad = math.radians(degrees)
    cos_a, sin_a = math.cos(rad), math.sin(rad)

    rotated: dict[str, tuple[float, float]] = {}
    for entity_id in selection:
        dx = formation.placements[entity_id].position[0] - cx
        dy = formation.placements[entity_id].position[1] - cy
        new_pos = (cx + dx * cos_a + dy * sin_a, cy - dx * sin_a + dy * cos_a)
        if not choreo.floor.contains(new_pos):
            raise EditError("OUT_OF_BOUNDS", f"rotation would push {entity_id!r} outside floor + margin")
        rotated[entity_id] = new_pos

    out = copy.deepcopy(choreo)
    new_formation = out.formation(formation_id)
    for entity_id, pos in rotated.items():
        pl = new_formation.placements[entity_id]
        pl.position = pos
        pl.body_orientation = normalize_angle(pl.body_orientation + degrees)
        pl.head_orientation = normalize_angle(pl.head_orientation + degrees)
    return out


def set_orientation(
    choreo: Choreography,
    formation_id: str,
    entity_ids,
    *,
    body: float | None = None,
    head: float | None = None,
) -> Choreography:
    """Overwrite body and/or head orientation for every selected entity."""
    formation = _require_formation(choreo, formation_id)
    selection = list(entity_ids)
    for entity_id in selection:
        if entity_id not in formation.placements:
            raise EditError("UNKNOWN_ENTITY", f"entity {entity_id!r} is not placed in formation {formation_id!r}")

    out = copy.deepcopy(choreo)
    new_formation = out.formation(formation_id)
    for entity_id in selection:
        pl = new_formation.placements[entity_id]
        if body is not None:
            pl.body_orientation = normalize_angle(body)
        if head is not None:
            pl.head_orientation = normalize_angle(head)
    return out


def reposition_on_timeline(
    choreo: Choreography,
    formation_id: str,
    new_position: TimelinePosition,
) -> Choreography:
    """Move a formation to a new musical position without reordering.

    The formation may not leapfrog a neighbor, and waypoints of the two
    adjacent transitions must stay strictly inside their (new) intervals;
    any conflict rejects the whole edit.
    """
    index = None
    for i, f in enumerate(choreo.formations):
        if f.id == formation_id:
            index = i
            break
    if index is None:
        raise EditError("UNKNOWN_FORMATION", f"no formation with id {formation_id!r}")
    if not timeline_in_bounds(choreo, new_position):
        raise EditError("TIMELINE_OUT_OF_BOUNDS", f"{new_position} lies outside the dances")
    for f in choreo.formations:
        if f.id != formation_id and f.timeline_position == new_position:
            raise EditError("POSITION_OCCUPIED", f"formation {f.id!r} already sits at {new_position}")

    if index > 0 and not choreo.formations[index - 1].timeline_position < new_position:
        raise EditError("ORDER_VIOLATION", "formation would move past its predecessor")
    if index < len(choreo.formations) - 1 and not new_position < choreo.formations[index + 1].timeline_position:
        raise EditError("ORDER_VIOLATION", "formation would move past its successor")

    for t in choreo.transitions:
        if t.to_formation_id == formation_id:
            for entity_id, wps in t.waypoints.items():
                if any(not wp.time < new_position for wp in wps):
                    raise EditError("WAYPOINT_CONFLICT", f"a waypoint of {entity_id!r} would fall outside the incoming transition")
        if t.from_formation_id == formation_id:
            for entity_id, wps in t.waypoints.items():
                if any(not new_position < wp.time for wp in wps):
                    raise EditError("WAYPOINT_CONFLICT", f"a waypoint of {entity_id!r} would fall outside the outgoing transition")

    out = copy.deepcopy(choreo)
    out.formations[index].timeline_position = new_position
    return out


def _require_transition(choreo: Choreography, from_formation_id: str) -> Transition:
    try:
        return choreo.transition_after(from_formation_id)
    except KeyError:
        raise EditError("UNKNOWN_TRANSITION", f"no transition leaves formation {from_formation_id!r}") from None


def set_waypoint(
    choreo: Choreography,
    from_formation_id: str,
    entity_id: str,
    time: TimelinePosition,
    position: tuple[float, float],
) -> Choreography:
    """Insert a waypoint in time order, or update one already at ``time``."""
    _require_transition(choreo, from_formation_id)
    if entity_id not in choreo.entity_ids():
        raise EditError("UNKNOWN_ENTITY", f"no entity with id {entity_id!r}")
    f_from = choreo.formation(from_formation_id)
    f_to = choreo.formations[choreo.formation_index(from_formation_id) + 1]
    if not (f_from.timeline_position < time < f_to.timeline_position):
        raise EditError("TIME_OUT_OF_RANGE", f"{time} is not strictly between the two formations")
    _require_in_bounds(choreo, position)

    out = copy.deepcopy(choreo)
    transition = out.transition_after(from_formation_id)
    waypoints = transition.waypoints.setdefault(entity_id, [])
    wp = Waypoint(time=time, position=(float(position[0]), float(position[1])))
    for i, existing in enumerate(waypoints):
        if existing.time == time:
            waypoints[i] = wp
            return out
    waypoints.append(wp)
    waypoints.sort(key=lambda w: w.time)
    return out


def remove_waypoint(
    choreo: Choreography,
    from_formation_id: str,
    entity_id: str,
    time: TimelinePosition,
) -> Choreography:
    """Delete exactly the waypoint of ``entity_id`` at ``time``."""
    transition = _require_transition(choreo, from_formation_id)
    existing = transition.waypoints.get(entity_id, [])
    if not any(wp.time == time for wp in existing):
        raise EditError("WAYPOINT_NOT_FOUND", f"{entity_id!r} has no waypoint at {time}")

    out = copy.deepcopy(choreo)
    new_transition = out.transition_after(from_formation_id)
    wps = new_transition.waypoints[entity_id]
    wps[:] = [wp for wp in wps if wp.time != time]
    if not wps:
        del new_transition.waypoints[entity_id]
    return out

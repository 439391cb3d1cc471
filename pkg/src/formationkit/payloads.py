"""JSON-ready payload builders shared by the CLI and the HTTP service.

Both fronts serialize these dicts with
:func:`formationkit.persistence.canonical_json_bytes`, so the same
request produces byte-identical output on either surface.
"""

from __future__ import annotations

from .analysis import detect_collisions, distance_report, heatmap
from .model import SCHEMA_VERSION, Choreography

__all__ = ["distances_payload", "collisions_payload", "heatmap_payload", "analysis_document"]


def distances_payload(choreo: Choreography) -> dict:
    report = distance_report(choreo)
    return {
        "accumulated": report.accumulated,
        "per_transition": [
            {"from": t.from_formation_id, "to": t.to_formation_id, "meters": meters}
            for t, meters in zip(choreo.transitions, report.per_transition)
        ],
    }


def collisions_payload(choreo: Choreography, threshold: float) -> dict:
    transitions = []
    for t in choreo.transitions:
        events = detect_collisions(choreo, t, threshold)
        transitions.append(
            {
                "from": t.from_formation_id,
                "to": t.to_formation_id,
                "events": [
                    {
                        "entity_a": e.entity_a,
                        "entity_b": e.entity_b,
                        "t_closest": e.t_closest,
                        "min_distance": e.min_distance,
                        "position_a": list(e.position_a),
                        "position_b": list(e.position_b),
                    }
                    for e in events
                ],
            }
        )
    return {"threshold": threshold, "transitions": transitions}


def heatmap_payload(choreo: Choreography, cell_size: float) -> dict:
    grid = heatmap(choreo, cell_size)
    return {
        "cell_size": grid.cell_size,
        "origin": list(grid.origin),
        "counts": grid.counts.tolist(),
        "total": int(grid.counts.sum()),
    }


def analysis_document(
    choreo: Choreography,
    *,
    distances: bool = False,
    collisions: float | None = None,
    heatmap_cell: float | None = None,
) -> dict:
    doc: dict = {"schema_version": SCHEMA_VERSION}
    if distances:
        doc["distances"] = distances_payload(choreo)
    if collisions is not None:
        doc["collisions"] = collisions_payload(choreo, collisions)
    if heatmap_cell is not None:
        doc["heatmap"] = heatmap_payload(choreo, heatmap_cell)
    return doc

"""Versioned choreography documents and report export.

Documents are byte-in/byte-out: callers own the file system.  Saving is
deterministic (sorted keys, shortest round-trip float formatting) so
identical models always produce identical bytes, which keeps documents
diff- and cache-friendly.
"""

from __future__ import annotations

import csv
import io
import json
import re
from importlib import resources

import jsonschema

from .assessment import DeviationSample, VideoMeta
from .errors import PersistenceError
from .model import (
    SCHEMA_VERSION,
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
    Violation,
    Waypoint,
    validate,
)

__all__ = [
    "save",
    "load",
    "choreography_to_document",
    "document_to_choreography",
    "export_report",
    "report_payload",
    "canonical_json_bytes",
    "document_schema",
    "document_violations",
]

_REQUIRED_RE = re.compile(r"^'(.*)' is a required property$")


def canonical_json_bytes(payload) -> bytes:
    """Stable JSON bytes: sorted keys, compact separators, trailing newline."""
    return (json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n").encode()


def document_schema() -> dict:
    """The published JSON schema for choreography documents."""
    text = resources.files("formationkit").joinpath("schemas/choreography.schema.json").read_text()
    return json.loads(text)


_validator = jsonschema.Draft202012Validator(document_schema())


# -- model <-> document -----------------------------------------------------

def _timeline_to_doc(pos: TimelinePosition) -> dict:
    return {"dance_index": pos.dance_index, "bar": pos.bar, "beat": pos.beat}


def _timeline_from_doc(doc: dict) -> TimelinePosition:
    return TimelinePosition(doc["dance_index"], doc["bar"], doc["beat"])


def choreography_to_document(choreo: Choreography) -> dict:
    return {
        "schema_version": choreo.schema_version,
        "title": choreo.title,
        "revision": choreo.revision,
        "floor": {
            "width": choreo.floor.width,
            "depth": choreo.floor.depth,
            "margin": choreo.floor.margin,
            "front_direction": choreo.floor.front_direction,
        },
        "dances": [
            {"name": d.name, "bar_count": d.bar_count, "beats_per_bar": d.beats_per_bar}
            for d in choreo.dances
        ],
        "entities": [
            {
                "id": e.id,
                "kind": e.kind,
                "role": e.role,
                "label": e.label,
                "member_ids": list(e.member_ids),
            }
            for e in choreo.entities
        ],
        "poses": [
            {"id": p.id, "joint_rotations": {j: list(r) for j, r in p.joint_rotations.items()}}
            for p in choreo.poses
        ],
        "formations": [
            {
                "id": f.id,
                "name": f.name,
                "timeline_position": _timeline_to_doc(f.timeline_position),
                "video_time": f.video_time,
                "placements": {
                    entity_id: {
                        "position": list(pl.position),
                        "body_orientation": pl.body_orientation,
                        "head_orientation": pl.head_orientation,
                        "point_definition": pl.point_definition,
                        "point_dancer": pl.point_dancer,
                        "pose_id": pl.pose_id,
                    }
                    for entity_id, pl in f.placements.items()
                },
                "shapes": [{"entity_ids": list(s.entity_ids), "label": s.label} for s in f.shapes],
            }
            for f in choreo.formations
        ],
        "transitions": [
            {
                "from_formation_id": t.from_formation_id,
                "to_formation_id": t.to_formation_id,
                "waypoints": {
                    entity_id: [
                        {"time": _timeline_to_doc(wp.time), "position": list(wp.position)}
                        for wp in wps
                    ]
                    for entity_id, wps in t.waypoints.items()
                },
            }
            for t in choreo.transitions
        ],
    }


def document_to_choreography(doc: dict) -> Choreography:
    return Choreography(
        schema_version=doc["schema_version"],
        title=doc["title"],
        revision=doc["revision"],
        floor=FloorSpec(
            width=doc["floor"]["width"],
            depth=doc["floor"]["depth"],
            margin=doc["floor"]["margin"],
            front_direction=doc["floor"].get("front_direction", "+y"),
        ),
        dances=[Dance(d["name"], d["bar_count"], d["beats_per_bar"]) for d in doc["dances"]],
        entities=[
            Entity(
                id=e["id"],
                kind=e["kind"],
                role=e.get("role", "none"),
                label=e.get("label", ""),
                member_ids=tuple(e.get("member_ids", [])),
            )
            for e in doc["entities"]
        ],
        poses=[
            Pose(id=p["id"], joint_rotations={j: tuple(r) for j, r in p.get("joint_rotations", {}).items()})
            for p in doc.get("poses", [])
        ],
        formations=[
            Formation(
                id=f["id"],
                name=f["name"],
                timeline_position=_timeline_from_doc(f["timeline_position"]),
                video_time=f.get("video_time"),
                placements={
                    entity_id: Placement(
                        position=tuple(pl["position"]),
                        body_orientation=pl.get("body_orientation", 0.0),
                        head_orientation=pl.get("head_orientation", 0.0),
                        point_definition=pl.get("point_definition", "body_center"),
                        point_dancer=pl.get("point_dancer"),
                        pose_id=pl.get("pose_id"),
                    )
                    for entity_id, pl in f["placements"].items()
                },
                shapes=[Shape(tuple(s["entity_ids"]), s.get("label", "")) for s in f.get("shapes", [])],
            )
            for f in doc["formations"]
        ],
        transitions=[
            Transition(
                from_formation_id=t["from_formation_id"],
                to_formation_id=t["to_formation_id"],
                waypoints={
                    entity_id: [
                        Waypoint(time=_timeline_from_doc(wp["time"]), position=tuple(wp["position"]))
                        for wp in wps
                    ]
                    for entity_id, wps in t["waypoints"].items()
                },
            )
            for t in doc["transitions"]
        ],
    )


# -- save / load ------------------------------------------------------------

def save(choreo: Choreography) -> bytes:
    """Serialize a well-formed choreography to deterministic JSON bytes."""
    violations = validate(choreo)
    if violations:
        first = violations[0]
        raise PersistenceError(
            "INVALID_MODEL",
            f"model has {len(violations)} violation(s), first: {first}",
            location=first.location,
        )
    return canonical_json_bytes(choreography_to_document(choreo))


def _check_schema_version(version) -> None:
    if not isinstance(version, str) or not re.fullmatch(r"\d+\.\d+\.\d+", version):
        raise PersistenceError("SCHEMA_VERSION_UNSUPPORTED", f"unparseable schema_version {version!r}", "/schema_version")
    major, minor, patch = (int(p) for p in version.split("."))
    cur_major, cur_minor, cur_patch = (int(p) for p in SCHEMA_VERSION.split("."))
    if major != cur_major or (minor, patch) > (cur_minor, cur_patch):
        raise PersistenceError(
            "SCHEMA_VERSION_UNSUPPORTED",
            f"document version {version} is not supported by reader version {SCHEMA_VERSION}",
            "/schema_version",
        )


def _error_location(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    if error.validator == "required":
        m = _REQUIRED_RE.match(error.message)
        if m:
            parts.append(m.group(1))
    return "/" + "/".join(parts)


def load(document: bytes | str | dict) -> Choreography:
    """Parse, schema-check, and semantically validate a document.

    Accepts raw bytes/text or an already-parsed JSON object.
    """
    if isinstance(document, (bytes, str)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise PersistenceError("PARSE_ERROR", f"not valid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise PersistenceError("PARSE_ERROR", "document root must be a JSON object")

    _check_schema_version(doc.get("schema_version"))

    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise PersistenceError("VALIDATION_FAILED", first.message, location=_error_location(first))

    choreo = document_to_choreography(doc)
    violations = validate(choreo)
    if violations:
        first = violations[0]
        error = PersistenceError("VALIDATION_FAILED", f"{first.code}: {first.message}", location=first.location)
        error.violations = violations
        raise error
    return choreo


def document_violations(doc: dict) -> list[Violation]:
    """Every problem in a parsed document, for lint-style reporting.

    Version and schema problems are reported as violations too, so the
    CLI can print one line per issue instead of stopping at the first.
    """
    try:
        _check_schema_version(doc.get("schema_version"))
    except PersistenceError as exc:
        return [Violation(exc.code, str(exc.args[0]), exc.location or "")]
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        return [Violation("VALIDATION_FAILED", e.message, _error_location(e)) for e in errors]
    return validate(document_to_choreography(doc))


# -- reports ------------------------------------------------------------------

def report_payload(samples: list[DeviationSample], markers, meta: VideoMeta) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "video": {"fps": meta.fps, "frame_offset": meta.frame_offset},
        "markers": [{"formation_id": fid, "frame": frame} for fid, frame in markers],
        "samples": [
            {
                "frame": s.frame,
                "time": s.time,
                "aggregate_rmsd": s.aggregate_rmsd,
                "missing": list(s.missing),
                "per_entity": {
                    entity_id: {
                        "actual": list(d.actual),
                        "planned": list(d.planned),
                        "deviation": d.deviation,
                    }
                    for entity_id, d in s.per_entity.items()
                },
            }
            for s in samples
        ],
    }


def export_report(
    samples: list[DeviationSample],
    markers: list[tuple[str, int]],
    meta: VideoMeta,
    format: str = "json",
) -> bytes:
    """Render an assessment as JSON (full) or CSV (per-entity rows)."""
    if not samples:
        raise PersistenceError("EMPTY_REPORT", "nothing to export: no deviation samples")
    if format == "json":
        return canonical_json_bytes(report_payload(samples, markers, meta))
    if format == "csv":
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["frame", "time", "entity", "actual_x", "actual_y", "planned_x", "planned_y", "deviation"])
        for s in samples:
            for entity_id in sorted(s.per_entity):
                d = s.per_entity[entity_id]
                writer.writerow([
                    s.frame,
                    repr(s.time),
                    entity_id,
                    repr(d.actual[0]),
                    repr(d.actual[1]),
                    repr(d.planned[0]),
                    repr(d.planned[1]),
                    repr(d.deviation),
                ])
        return buffer.getvalue().encode()
    raise PersistenceError("UNSUPPORTED_FORMAT", f"unknown report format {format!r}")

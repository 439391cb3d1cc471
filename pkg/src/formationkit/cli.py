"""Command-line entry points: validate, analyze, assess, serve.

Exit codes: 0 success; 1 the input choreography is invalid; 2 a file is
missing or unparseable; ``assess`` additionally uses 3 for homography
failures and 4 when the choreography carries no video timestamps.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import payloads, persistence
from .assessment import (
    assess,
    estimate_homography,
    formation_markers,
    parse_correspondences,
    parse_tracks,
)
from .errors import AssessmentError, PersistenceError
from .model import Choreography

EXIT_INVALID = 1
EXIT_FILE = 2
EXIT_HOMOGRAPHY = 3
EXIT_NO_TIMESTAMPS = 4

_HOMOGRAPHY_CODES = {"TOO_FEW_POINTS", "DEGENERATE_CONFIGURATION", "ILL_CONDITIONED"}


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_FILE)


def _load_choreography(path: str) -> Choreography:
    data = _read_file(path)
    try:
        return persistence.load(data)
    except PersistenceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FILE if exc.code == "PARSE_ERROR" else EXIT_INVALID)


def _write_output(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


@click.group()
def main():
    """Plan, analyze, and assess group-dance formations."""


@main.command()
@click.argument("path")
def validate(path: str):
    """Check a choreography file; print one violation per line."""
    data = _read_file(path)
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        click.echo(f"PARSE_ERROR / {exc}", err=True)
        sys.exit(EXIT_FILE)
    if not isinstance(doc, dict):
        click.echo("PARSE_ERROR / document root must be a JSON object", err=True)
        sys.exit(EXIT_FILE)
    violations = persistence.document_violations(doc)
    for v in violations:
        click.echo(f"{v.code} {v.location or '/'} {v.message}")
    sys.exit(EXIT_INVALID if violations else 0)


@main.command()
@click.argument("path")
@click.option("--distances", is_flag=True, help="Include per-entity movement distances.")
@click.option(
    "--collisions",
    is_flag=False,
    flag_value="0.5",
    default=None,
    metavar="[THRESHOLD]",
    help="Include collision events; --collisions=T overrides the 0.5 m threshold.",
)
@click.option(
    "--heatmap",
    is_flag=False,
    flag_value="0.5",
    default=None,
    metavar="[CELL]",
    help="Include the floor-utilization heatmap; --heatmap=C overrides the 0.5 m cell size.",
)
@click.option("--out", default=None, help="Write the JSON report here instead of stdout.")
def analyze(path: str, distances: bool, collisions: str | None, heatmap: str | None, out: str | None):
    """Analyze transitions and floor utilization of a choreography."""
    if not distances and collisions is None and heatmap is None:
        raise click.UsageError("nothing to analyze: pass --distances, --collisions, and/or --heatmap")
    choreo = _load_choreography(path)
    doc = payloads.analysis_document(
        choreo,
        distances=distances,
        collisions=float(collisions) if collisions is not None else None,
        heatmap_cell=float(heatmap) if heatmap is not None else None,
    )
    _write_output(persistence.canonical_json_bytes(doc), out)


def _resolve_selection(choreo: Choreography, names: tuple[str, ...]) -> list[str] | None:
    if not names:
        return None
    ids = choreo.entity_ids()
    by_label = {}
    for e in choreo.entities:
        by_label.setdefault(e.label, []).append(e.id)
    resolved = []
    for name in names:
        if name in ids:
            resolved.append(name)
        elif len(by_label.get(name, [])) == 1:
            resolved.append(by_label[name][0])
        else:
            click.echo(f"error: --select {name!r} matches no unique entity id or label", err=True)
            sys.exit(EXIT_FILE)
    return resolved


@main.command(name="assess")
@click.argument("choreography_path")
@click.argument("tracks_path")
@click.argument("correspondences_path")
@click.option("--stride", default=1, show_default=True, help="Sample every Nth frame.")
@click.option("--select", multiple=True, help="Entity id or label to aggregate over (repeatable).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", default=None, help="Write the report here instead of stdout.")
def assess_command(
    choreography_path: str,
    tracks_path: str,
    correspondences_path: str,
    stride: int,
    select: tuple[str, ...],
    fmt: str,
    out: str | None,
):
    """Compare a performance's tracks against the planned choreography."""
    choreo = _load_choreography(choreography_path)
    selection = _resolve_selection(choreo, select)
    try:
        track_set = parse_tracks(_read_file(tracks_path), choreo.entity_ids())
        correspondences = parse_correspondences(_read_file(correspondences_path))
    except AssessmentError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_HOMOGRAPHY if exc.code in _HOMOGRAPHY_CODES else EXIT_FILE)

    try:
        homography = estimate_homography(correspondences)
        samples = assess(choreo, track_set.tracks, homography, track_set.meta, selection, stride)
        markers = formation_markers(choreo, track_set.meta)
    except AssessmentError as exc:
        click.echo(f"error: {exc}", err=True)
        if exc.code in _HOMOGRAPHY_CODES:
            sys.exit(EXIT_HOMOGRAPHY)
        if exc.code == "NO_TIMESTAMPS":
            sys.exit(EXIT_NO_TIMESTAMPS)
        sys.exit(EXIT_FILE)

    _write_output(persistence.export_report(samples, markers, track_set.meta, fmt), out)


@main.command()
@click.option("--port", default=8000, show_default=True, envvar="FORMATIONKIT_PORT", help="Port to bind.")
@click.option("--host", default="127.0.0.1", show_default=True, help="Interface to bind.")
@click.option(
    "--data-dir",
    default="formationkit-data",
    show_default=True,
    envvar="FORMATIONKIT_DATA_DIR",
    help="Directory holding choreography and assessment documents.",
)
def serve(port: int, host: str, data_dir: str):
    """Run the HTTP service backing the studio UI."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()

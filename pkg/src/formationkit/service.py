"""HTTP service exposing the engine to the studio UI and to scripts.

Documents live as one JSON file per choreography under the data
directory, mirroring the file-sharing workflow the tool replaces.
Mutations use optimistic concurrency: a PUT must cite the revision it
was based on and gets a 409 if someone else won the race; assessments
are immutable and keyed by a server-generated id.
"""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import payloads
from .assessment import (
    VideoMeta,
    assess,
    estimate_homography,
    formation_markers,
    parse_correspondences,
    parse_tracks,
)
from .errors import AssessmentError, PersistenceError
from .model import SCHEMA_VERSION
from .persistence import canonical_json_bytes, load, report_payload, save

__all__ = ["create_app", "DocumentStore"]

_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]{0,127}")


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class DocumentStore:
    """File-backed choreography and assessment storage with per-id locks."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.choreo_dir = self.root / "choreographies"
        self.assessment_dir = self.root / "assessments"
        self.choreo_dir.mkdir(parents=True, exist_ok=True)
        self.assessment_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, choreography_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(choreography_id, threading.Lock())

    def choreo_path(self, choreography_id: str) -> Path:
        return self.choreo_dir / f"{choreography_id}.json"

    def assessment_path(self, assessment_id: str) -> Path:
        return self.assessment_dir / f"{assessment_id}.json"

    def list_choreographies(self) -> list[dict]:
        entries = []
        for path in sorted(self.choreo_dir.glob("*.json")):
            choreo = load(path.read_bytes())
            entries.append({"id": path.stem, "title": choreo.title, "revision": choreo.revision})
        return entries


def _error(status: int, code: str, message: str, location: str | None = None, **extra) -> JSONResponse:
    body = {"schema_version": SCHEMA_VERSION, "error": {"code": code, "message": message}}
    if location:
        body["error"]["location"] = location
    body.update(extra)
    return JSONResponse(body, status_code=status)


def _json_bytes_response(payload) -> Response:
    return Response(content=canonical_json_bytes(payload), media_type="application/json")


def create_app(data_dir: str | Path) -> FastAPI:
    store = DocumentStore(data_dir)
    app = FastAPI(title="formationkit", version=SCHEMA_VERSION)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store

    @app.get("/health")
    def health():
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.get("/choreographies")
    def list_choreographies():
        return {"schema_version": SCHEMA_VERSION, "choreographies": store.list_choreographies()}

    @app.get("/choreographies/{choreography_id}")
    def get_choreography(choreography_id: str):
        path = store.choreo_path(choreography_id)
        if not _ID_RE.fullmatch(choreography_id) or not path.exists():
            return _error(404, "NOT_FOUND", f"no choreography {choreography_id!r}")
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.put("/choreographies/{choreography_id}")
    def put_choreography(choreography_id: str, document: dict = Body(...)):
        if not _ID_RE.fullmatch(choreography_id):
            return _error(400, "INVALID_ID", "choreography ids are limited to letters, digits, '._-'")
        try:
            choreo = load(document)
        except PersistenceError as exc:
            return _error(400, exc.code, str(exc.args[0]), exc.location)

        path = store.choreo_path(choreography_id)
        with store.lock(choreography_id):
            if path.exists():
                current = load(path.read_bytes()).revision
            else:
                current = 0
            if choreo.revision != current:
                return _error(
                    409,
                    "REVISION_CONFLICT",
                    f"document cites revision {choreo.revision} but the stored revision is {current}",
                    current_revision=current,
                )
            choreo.revision = current + 1
            _atomic_write(path, save(choreo))
            return {"schema_version": SCHEMA_VERSION, "id": choreography_id, "revision": choreo.revision}

    def _load_choreo(choreography_id: str):
        path = store.choreo_path(choreography_id)
        if not _ID_RE.fullmatch(choreography_id) or not path.exists():
            return None
        return load(path.read_bytes())

    @app.get("/choreographies/{choreography_id}/analysis/{section}")
    def analysis(choreography_id: str, section: str, threshold: float = 0.5, cell: float = 0.5):
        choreo = _load_choreo(choreography_id)
        if choreo is None:
            return _error(404, "NOT_FOUND", f"no choreography {choreography_id!r}")
        if section == "distances":
            doc = payloads.analysis_document(choreo, distances=True)
        elif section == "collisions":
            doc = payloads.analysis_document(choreo, collisions=threshold)
        elif section == "heatmap":
            doc = payloads.analysis_document(choreo, heatmap_cell=cell)
        else:
            return _error(404, "NOT_FOUND", f"unknown analysis section {section!r}")
        return _json_bytes_response(doc)

    @app.post("/choreographies/{choreography_id}/assessments")
    def post_assessment(choreography_id: str, request: dict = Body(...)):
        choreo = _load_choreo(choreography_id)
        if choreo is None:
            return _error(404, "NOT_FOUND", f"no choreography {choreography_id!r}")
        try:
            track_set = parse_tracks(request["tracks_xml"], choreo.entity_ids())
            correspondences = parse_correspondences(request["correspondences"])
        except KeyError as exc:
            return _error(400, "MALFORMED_REQUEST", f"missing field {exc}")
        except AssessmentError as exc:
            return _error(400, exc.code, str(exc.args[0]))

        meta = track_set.meta
        if request.get("meta"):
            raw = request["meta"]
            meta = VideoMeta(fps=float(raw.get("fps", meta.fps)), frame_offset=int(raw.get("frame_offset", meta.frame_offset)))
        selection = request.get("select")
        stride = int(request.get("stride", 1))

        try:
            homography = estimate_homography(correspondences)
            samples = assess(choreo, track_set.tracks, homography, meta, selection, stride)
            markers = formation_markers(choreo, meta)
        except AssessmentError as exc:
            status = 422 if exc.code in ("DEGENERATE_CONFIGURATION", "TOO_FEW_POINTS", "ILL_CONDITIONED") else 400
            return _error(status, exc.code, str(exc.args[0]))

        assessment_id = uuid.uuid4().hex
        report = report_payload(samples, markers, meta)
        stored = {
            "schema_version": SCHEMA_VERSION,
            "id": assessment_id,
            "choreography_id": choreography_id,
            "status": "complete",
            "stride": stride,
            "selection": sorted(selection) if selection else sorted({t.entity_id for t in track_set.tracks}),
            "homography": {
                "matrix": homography.matrix.tolist(),
                "residual": homography.residual,
            },
            "report": report,
        }
        _atomic_write(store.assessment_path(assessment_id), canonical_json_bytes(stored))
        return {
            "schema_version": SCHEMA_VERSION,
            "assessment_id": assessment_id,
            "status": "complete",
            "sample_count": len(samples),
        }

    def _load_assessment(assessment_id: str):
        path = store.assessment_path(assessment_id)
        if not _ID_RE.fullmatch(assessment_id) or not path.exists():
            return None
        return json.loads(path.read_bytes())

    @app.get("/assessments/{assessment_id}")
    def get_assessment(assessment_id: str):
        stored = _load_assessment(assessment_id)
        if stored is None:
            return _error(404, "NOT_FOUND", f"no assessment {assessment_id!r}")
        return _json_bytes_response(stored)

    @app.get("/assessments/{assessment_id}/timeline")
    def assessment_timeline(assessment_id: str, select: str | None = None):
        stored = _load_assessment(assessment_id)
        if stored is None:
            return _error(404, "NOT_FOUND", f"no assessment {assessment_id!r}")
        selected = select.split(",") if select else stored["selection"]
        frames, times, rmsd = [], [], []
        for sample in stored["report"]["samples"]:
            frames.append(sample["frame"])
            times.append(sample["time"])
            squares = [
                sample["per_entity"][e]["deviation"] ** 2
                for e in selected
                if e in sample["per_entity"]
            ]
            rmsd.append(math.sqrt(sum(squares) / len(squares)) if squares else None)
        return _json_bytes_response(
            {
                "schema_version": SCHEMA_VERSION,
                "assessment_id": assessment_id,
                "select": selected,
                "frames": frames,
                "times": times,
                "rmsd": rmsd,
                "markers": stored["report"]["markers"],
            }
        )

    @app.get("/assessments/{assessment_id}/frames/{frame}")
    def assessment_frame(assessment_id: str, frame: int):
        stored = _load_assessment(assessment_id)
        if stored is None:
            return _error(404, "NOT_FOUND", f"no assessment {assessment_id!r}")
        for sample in stored["report"]["samples"]:
            if sample["frame"] == frame:
                return _json_bytes_response({"schema_version": SCHEMA_VERSION, **sample})
        return _error(404, "NOT_FOUND", f"frame {frame} is not part of assessment {assessment_id!r}")

    return app

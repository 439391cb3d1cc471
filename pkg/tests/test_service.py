"""HTTP service: documents, optimistic concurrency, analysis, assessments."""

import json
import math
from concurrent.futures import ThreadPoolExecutor

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from formationkit.cli import main as cli_main
from formationkit.persistence import load, save
from formationkit.service import create_app

from helpers import basic_choreography, crossing_choreography, synthetic_performance


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(tmp_path / "data"))


def put_document(client, cid, choreo_bytes):
    return client.put(f"/choreographies/{cid}", json=json.loads(choreo_bytes))


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert "schema_version" in body


def test_put_get_round_trip(client):
    choreo = basic_choreography()
    response = put_document(client, "demo", save(choreo))
    assert response.status_code == 200
    assert response.json()["revision"] == 1

    fetched = client.get("/choreographies/demo")
    assert fetched.status_code == 200
    loaded = load(fetched.content)
    assert loaded.revision == 1
    loaded.revision = choreo.revision
    assert loaded == choreo

    listing = client.get("/choreographies").json()["choreographies"]
    assert listing == [{"id": "demo", "title": "Fixture", "revision": 1}]


def test_put_requires_matching_base_revision(client):
    choreo = basic_choreography()
    assert put_document(client, "demo", save(choreo)).status_code == 200

    # stale base: still citing revision 0
    stale = put_document(client, "demo", save(choreo))
    assert stale.status_code == 409
    assert stale.json()["current_revision"] == 1

    # fresh base: cite revision 1
    choreo.revision = 1
    assert put_document(client, "demo", save(choreo)).status_code == 200


def test_put_invalid_document_reports_location(client):
    doc = json.loads(save(basic_choreography()))
    del doc["formations"][0]["placements"]
    response = client.put("/choreographies/demo", json=doc)
    assert response.status_code == 400
    assert response.json()["error"]["location"] == "/formations/0/placements"


def test_unknown_ids_are_404(client):
    assert client.get("/choreographies/nope").status_code == 404
    assert client.get("/choreographies/nope/analysis/distances").status_code == 404
    assert client.get("/assessments/nope/timeline").status_code == 404


def test_concurrent_stale_puts_one_winner(client):
    choreo = basic_choreography()
    assert put_document(client, "demo", save(choreo)).status_code == 200
    choreo.revision = 1
    body = json.loads(save(choreo))

    n = 8
    with ThreadPoolExecutor(max_workers=n) as pool:
        codes = list(
            pool.map(lambda _: client.put("/choreographies/demo", json=body).status_code, range(n))
        )
    assert sorted(codes) == [200] + [409] * (n - 1)
    assert load(client.get("/choreographies/demo").content).revision == 2


def test_analysis_endpoints_match_cli_bytes(client, tmp_path):
    choreo = crossing_choreography()
    put_document(client, "cross", save(choreo))
    path = tmp_path / "cross.json"
    path.write_bytes(save(choreo))

    runner = CliRunner()
    for args, url in [
        (["--distances"], "/choreographies/cross/analysis/distances"),
        (["--collisions=0.7"], "/choreographies/cross/analysis/collisions?threshold=0.7"),
        (["--heatmap=0.5"], "/choreographies/cross/analysis/heatmap?cell=0.5"),
    ]:
        result = runner.invoke(cli_main, ["analyze", str(path), *args])
        assert result.exit_code == 0
        response = client.get(url)
        assert response.status_code == 200
        assert response.content == result.stdout_bytes


def test_assessment_flow(client):
    data = synthetic_performance(seed=9, n_dancers=4, n_formations=3, fps=5.0, seconds_per_formation=2.0)
    put_document(client, "perf", data["choreography_bytes"])

    stride = 3
    response = client.post(
        "/choreographies/perf/assessments",
        json={
            "tracks_xml": data["tracks_bytes"].decode(),
            "correspondences": json.loads(data["correspondences_bytes"]),
            "stride": stride,
        },
    )
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["status"] == "complete"
    expected_samples = math.ceil(data["n_frames"] / stride)
    assert body["sample_count"] == expected_samples

    timeline = client.get(f"/assessments/{body['assessment_id']}/timeline").json()
    assert len(timeline["frames"]) == expected_samples
    assert len(timeline["rmsd"]) == expected_samples
    assert all(r < 1e-9 for r in timeline["rmsd"])
    assert timeline["markers"][0]["frame"] == 0

    # narrowing the selection recomputes the aggregate
    narrowed = client.get(f"/assessments/{body['assessment_id']}/timeline?select=d1").json()
    assert narrowed["select"] == ["d1"]
    assert len(narrowed["rmsd"]) == expected_samples

    frame = client.get(f"/assessments/{body['assessment_id']}/frames/0")
    assert frame.status_code == 200
    assert "d1" in frame.json()["per_entity"]
    assert client.get(f"/assessments/{body['assessment_id']}/frames/999999").status_code == 404


def test_degenerate_homography_is_422(client):
    data = synthetic_performance(seed=9, n_dancers=4, n_formations=3, fps=5.0, seconds_per_formation=2.0)
    put_document(client, "perf", data["choreography_bytes"])
    collinear = [
        {"video": [0, 0], "floor": [0.0, 0.0]},
        {"video": [100, 100], "floor": [1.0, 1.0]},
        {"video": [200, 200], "floor": [2.0, 2.0]},
        {"video": [0, 300], "floor": [0.0, 3.0]},
    ]
    response = client.post(
        "/choreographies/perf/assessments",
        json={"tracks_xml": data["tracks_bytes"].decode(), "correspondences": collinear},
    )
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "DEGENERATE_CONFIGURATION"


def test_persisted_documents_reload(client, tmp_path):
    choreo = basic_choreography()
    put_document(client, "keeper", save(choreo))
    stored = (tmp_path / "data" / "choreographies" / "keeper.json").read_bytes()
    assert load(stored).title == "Fixture"

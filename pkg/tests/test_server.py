import json

import pytest
from fastapi.testclient import TestClient

from msvis.server import Registry, create_app, slugify

from conftest import span, span_lines


@pytest.fixture()
def client(minisys_path):
    app = create_app(Registry())
    with TestClient(app) as client:
        client.post("/api/systems", content=minisys_path.read_bytes())
        yield client


SID = "minisys"


def sim_config(**overrides):
    doc = {
        "start_mode": "mock",
        "path": "s2>s1>s4>s6",
        "mock_payload": "{}",
        "failures": [],
        "tick": 0,
    }
    doc.update(overrides)
    return json.dumps(doc).encode()


class TestSlug:
    def test_lowercases_and_dashes(self):
        assert slugify("Minisys") == "minisys"
        assert slugify("  A__B  ") == "a-b"
        assert slugify("***") == "system"


class TestRegistration:
    def test_register_returns_id(self, minisys_path):
        app = create_app(Registry())
        with TestClient(app) as client:
            response = client.post("/api/systems", content=minisys_path.read_bytes())
            assert response.status_code == 201
            assert response.json() == {"system_id": SID}

    def test_listing(self, client):
        response = client.get("/api/systems")
        assert response.status_code == 200
        doc = response.json()
        assert doc["systems"] == [
            {"system_id": SID, "system_name": "Minisys", "services": 6}
        ]

    def test_duplicate_is_conflict(self, client, minisys_path):
        response = client.post("/api/systems", content=minisys_path.read_bytes())
        assert response.status_code == 409

    def test_invalid_manifest_is_bad_request(self, client):
        response = client.post("/api/systems", content=b'{"nope": 1}')
        assert response.status_code == 400
        assert "error" in response.json()

    def test_unknown_system_is_not_found(self, client):
        response = client.get("/api/systems/ghost/views/service")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownSystem"


class TestTraceIngestion:
    def test_report_counts(self, client):
        lines = span_lines(
            [
                span("t1", "a", None, "s2", 1, endpoint="POST /api/v1/s2/submit"),
                span("t1", "b", "a", "s1", 2, endpoint="GET /api/v1/s1/info"),
                span("t2", "c", None, "s3", 1),
            ]
        )
        response = client.post(f"/api/systems/{SID}/traces", content=lines.encode())
        assert response.status_code == 200
        assert response.json() == {"traces": 2, "paths": 2, "malformed_count": 0}

    def test_uploads_accumulate(self, client):
        first = span_lines([span("t1", "a", None, "s2", 1)])
        second = span_lines([span("t2", "b", None, "s3", 1)])
        client.post(f"/api/systems/{SID}/traces", content=first.encode())
        client.post(f"/api/systems/{SID}/traces", content=second.encode())
        response = client.get(f"/api/systems/{SID}/metrics/path-hits")
        keys = [e["key"] for e in response.json()["entries"]]
        assert sorted(keys) == ["s2", "s3"]

    def test_empty_body_is_bad_request(self, client):
        response = client.post(f"/api/systems/{SID}/traces", content=b"  ")
        assert response.status_code == 400

    def test_unknown_system(self, client):
        response = client.post("/api/systems/ghost/traces", content=b"x")
        assert response.status_code == 404


class TestViews:
    def test_service_view_is_idempotent(self, client):
        first = client.get(f"/api/systems/{SID}/views/service?layout_seed=3")
        second = client.get(f"/api/systems/{SID}/views/service?layout_seed=3")
        assert first.status_code == 200
        assert first.content == second.content

    def test_layout_seed_changes_positions_only(self, client):
        a = client.get(f"/api/systems/{SID}/views/service?layout_seed=1").json()
        b = client.get(f"/api/systems/{SID}/views/service?layout_seed=2").json()
        assert a["nodes"] == b["nodes"]
        assert a["edges"] == b["edges"]
        assert a["layout"]["positions"] != b["layout"]["positions"]

    def test_system_view(self, client):
        doc = client.get(f"/api/systems/{SID}/views/system").json()
        assert doc["level"] == "system"
        assert len(doc["nodes"]) == 4

    def test_unknown_level(self, client):
        assert client.get(f"/api/systems/{SID}/views/warp").status_code == 404

    def test_function_view(self, client):
        doc = client.get(f"/api/systems/{SID}/views/function/s1").json()
        assert doc["service"] == "s1"
        assert doc["participants"] == ["handle", "resolve", "emit"]

    def test_function_view_unknown_endpoint(self, client):
        response = client.get(
            f"/api/systems/{SID}/views/function/s1", params={"endpoint": "GET /nope"}
        )
        assert response.status_code == 404


class TestFilters:
    def test_node_filter(self, client):
        doc = client.get(f"/api/systems/{SID}/filter/node/s1").json()
        assert sorted(n["id"] for n in doc["nodes"]) == ["s1", "s2", "s4", "s6"]
        assert doc["focus"] == "s1"

    def test_node_filter_unknown(self, client):
        assert client.get(f"/api/systems/{SID}/filter/node/zz").status_code == 404

    def test_path_filter(self, client):
        response = client.get(f"/api/systems/{SID}/filter/path?path=s2>s1>s4>s6")
        doc = response.json()
        assert doc["highlight"]["path"] == "s2>s1>s4>s6"
        assert len(doc["highlight"]["edges"]) == 3
        assert len(doc["nodes"]) == 6

    def test_path_filter_invalid_path(self, client):
        response = client.get(f"/api/systems/{SID}/filter/path?path=s1>s2")
        assert response.status_code == 422
        assert response.json()["error"] == "PathNotInGraph"

    def test_path_filter_malformed_key(self, client):
        response = client.get(f"/api/systems/{SID}/filter/path?path=a>>b")
        assert response.status_code == 422


class TestMetrics:
    def test_service_dependency(self, client):
        doc = client.get(f"/api/systems/{SID}/metrics/service-dependency").json()
        assert doc["metric"] == "service-dependency"
        assert doc["entries"][0]["score"] == 2

    def test_path_metrics_empty_without_traces(self, client):
        doc = client.get(f"/api/systems/{SID}/metrics/path-hits").json()
        assert doc == {"metric": "path-hits", "entries": []}

    def test_unknown_metric(self, client):
        assert client.get(f"/api/systems/{SID}/metrics/magic").status_code == 404


class TestSimulations:
    def test_create_and_fetch(self, client):
        response = client.post(f"/api/systems/{SID}/simulations", content=sim_config())
        assert response.status_code == 201
        sim_id = response.json()["sim_id"]
        doc = client.get(f"/api/systems/{SID}/simulations/{sim_id}").json()
        assert doc["state"] == "completed"
        assert len(doc["events"]) == 4

    def test_invalid_config_is_unprocessable(self, client):
        response = client.post(
            f"/api/systems/{SID}/simulations", content=b'{"start_mode": "warp"}'
        )
        assert response.status_code == 422

    def test_bad_json_is_unprocessable(self, client):
        response = client.post(f"/api/systems/{SID}/simulations", content=b"{")
        assert response.status_code == 422

    def test_path_not_in_graph(self, client):
        response = client.post(
            f"/api/systems/{SID}/simulations", content=sim_config(path="s1>s2")
        )
        assert response.status_code == 422

    def test_unknown_sim_id(self, client):
        assert client.get(f"/api/systems/{SID}/simulations/zz/events").status_code == 404


class TestEventStream:
    def parse_sse(self, body):
        events = []
        for block in body.strip().split("\n\n"):
            lines = dict(line.split(": ", 1) for line in block.splitlines())
            events.append((lines["event"], json.loads(lines["data"])))
        return events

    def test_stream_frames_every_event(self, client):
        failures = [{"target": "edge", "from_id": "s1", "to_id": "s4"}]
        response = client.post(
            f"/api/systems/{SID}/simulations", content=sim_config(failures=failures)
        )
        sim_id = response.json()["sim_id"]
        body = client.get(f"/api/systems/{SID}/simulations/{sim_id}/events").text
        events = self.parse_sse(body)
        assert [kind for kind, _ in events] == ["sim"] * 5 + ["state"]
        assert events[2][1]["status"] == "failed"
        assert events[-1][1] == {"state": "failed"}

    def test_stream_replays_identically(self, client):
        response = client.post(f"/api/systems/{SID}/simulations", content=sim_config())
        sim_id = response.json()["sim_id"]
        url = f"/api/systems/{SID}/simulations/{sim_id}/events"
        assert client.get(url).text == client.get(url).text


class TestSnapshot:
    def test_registry_survives_restart(self, tmp_path, minisys_path):
        snapshot = tmp_path / "registry.json"
        app = create_app(Registry(), snapshot_path=snapshot)
        with TestClient(app) as client:
            client.post("/api/systems", content=minisys_path.read_bytes())
            lines = span_lines([span("t1", "a", None, "s2", 1)])
            client.post(f"/api/systems/{SID}/traces", content=lines.encode())
        assert snapshot.exists()

        revived = create_app(Registry(), snapshot_path=snapshot)
        with TestClient(revived) as client:
            listing = client.get("/api/systems").json()
            assert listing["systems"][0]["system_id"] == SID
            doc = client.get(f"/api/systems/{SID}/metrics/path-hits").json()
            assert doc["entries"] == [{"rank": 1, "key": "s2", "score": 1}]


class TestCors:
    def test_configured_origin_allowed(self, minisys_path):
        app = create_app(Registry(), ui_origin="http://localhost:5173")
        with TestClient(app) as client:
            client.post("/api/systems", content=minisys_path.read_bytes())
            response = client.get(
                "/api/systems", headers={"Origin": "http://localhost:5173"}
            )
            assert (
                response.headers["access-control-allow-origin"]
                == "http://localhost:5173"
            )

import json

import pytest
from fastapi.testclient import TestClient

from askgraph.config import fixture_path
from askgraph.service import create_app

Q_RUNNING = (
    "Name the sea into which Danish Straits flows and has Kaliningrad"
    " as one of the city on the shore"
)


@pytest.fixture
def client(dbpedia_server):
    settings = {
        "endpoint": dbpedia_server.url,
        "embeddings": fixture_path("embeddings.txt"),
        "max_retries": 0,
    }
    app = create_app(settings)
    with TestClient(app) as test_client:
        yield test_client


class TestHealthAndConfig:
    def test_health(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"

    def test_config_reports_settings_and_defaults(self, client):
        payload = client.get("/api/config").json()
        assert payload["defaults"]["max_vr"] == 400
        assert payload["defaults"]["max_queries"] == 40
        assert "endpoint" in payload["settings"]


class TestAnswer:
    def test_running_example_payload(self, client):
        response = client.post("/api/answer", json={"question": Q_RUNNING})
        assert response.status_code == 200
        payload = response.json()
        assert [a["value"] for a in payload["answers"]] == [
            "http://dbpedia.org/resource/Baltic_Sea"
        ]
        assert payload["answers"][0]["kept"] is True
        assert payload["prediction"] == {"data_type": "string", "semantic_type": "sea"}
        assert payload["plans"][0]["rank"] == 1
        assert payload["plans"][0]["score"] == payload["plans"][0]["bgp"]["score"]
        assert len(payload["pgp"]["nodes"]) == 3
        assert len(payload["agp"]["edges"]) == 2
        assert all(
            e["relevant_predicates"] for e in payload["agp"]["edges"]
        )
        for phase in ("qu", "linking", "execution_filtration", "total"):
            assert phase in payload["timings"]

    def test_identical_requests_identical_answers(self, client):
        first = client.post("/api/answer", json={"question": Q_RUNNING}).json()
        second = client.post("/api/answer", json={"question": Q_RUNNING}).json()
        assert first["answers"] == second["answers"]
        assert [p["sparql"] for p in first["plans"]] == [
            p["sparql"] for p in second["plans"]
        ]

    def test_empty_question_rejected(self, client):
        response = client.post("/api/answer", json={"question": "  "})
        assert response.status_code == 422

    def test_phase_error_structured(self, client):
        response = client.post(
            "/api/answer",
            json={
                "question": Q_RUNNING,
                "endpoint_url": "http://127.0.0.1:1/sparql",
                "overrides": {"timeout": 0.2, "max_retries": 0},
            },
        )
        assert response.status_code == 502
        assert response.json()["detail"]["phase"] == "linking"

    def test_unknown_override_rejected(self, client):
        response = client.post(
            "/api/answer", json={"question": Q_RUNNING, "overrides": {"bogus": 1}}
        )
        assert response.status_code == 422

    def test_request_override_changes_behavior(self, client):
        response = client.post(
            "/api/answer",
            json={"question": Q_RUNNING, "overrides": {"max_queries": 1}},
        )
        payload = response.json()
        assert len(payload["plans"]) == 1

    def test_dropped_answers_carry_reason(self, client):
        response = client.post(
            "/api/answer",
            json={"question": "When did the Boston Tea Party take place?"},
        )
        payload = response.json()
        assert [a["value"] for a in payload["answers"]] == ["1773-12-16"]
        assert payload["dropped"]
        assert all(d["reason"] == "dtype_mismatch" for d in payload["dropped"])
        assert all(d["kept"] is False for d in payload["dropped"])


class TestExecute:
    def test_select_round_trip_with_pipeline(self, client):
        answer_payload = client.post("/api/answer", json={"question": Q_RUNNING}).json()
        rank1 = answer_payload["plans"][0]
        response = client.post("/api/execute", json={"query": rank1["sparql"]})
        assert response.status_code == 200
        payload = response.json()
        assert payload["form"] == "select"
        values = {row["unknown1"]["value"] for row in payload["rows"]}
        assert values == {a["value"] for a in answer_payload["answers"]}

    def test_edited_plan_returns_different_answers(self, client):
        answer_payload = client.post("/api/answer", json={"question": Q_RUNNING}).json()
        edited = answer_payload["plans"][0]["sparql"].replace(
            "property/outflow", "property/inflow"
        )
        response = client.post("/api/execute", json={"query": edited})
        assert response.status_code == 200
        assert response.json()["rows"] == []

    def test_ask_form(self, client):
        response = client.post(
            "/api/execute",
            json={
                "query": "ASK { <http://dbpedia.org/resource/Germany>"
                " <http://dbpedia.org/ontology/capital>"
                " <http://dbpedia.org/resource/Berlin> }"
            },
        )
        assert response.json() == {"form": "ask", "boolean": True}

    def test_malformed_query_surfaces_endpoint_error(self, client):
        response = client.post("/api/execute", json={"query": "SELECT WHERE junk"})
        assert response.status_code == 502
        assert "phase" in response.json()["detail"]


class TestBenchmarkRoute:
    def test_multipart_upload(self, client):
        with open(fixture_path("benchmark.json"), "rb") as handle:
            response = client.post(
                "/api/benchmark", files={"file": ("benchmark.json", handle, "application/json")}
            )
        assert response.status_code == 200
        payload = response.json()
        assert payload["questions"] == 5
        assert payload["macro"]["f1"] == pytest.approx(11 / 15, abs=1e-9)

    def test_malformed_upload(self, client):
        response = client.post(
            "/api/benchmark", files={"file": ("bench.json", b"[]", "application/json")}
        )
        assert response.status_code == 422


class TestRequestLog:
    def test_json_lines_emitted(self, client, caplog):
        import logging

        with caplog.at_level(logging.INFO, logger="askgraph.requests"):
            client.post("/api/answer", json={"question": Q_RUNNING})
        records = [r for r in caplog.records if r.name == "askgraph.requests"]
        assert records
        entry = json.loads(records[-1].getMessage())
        assert entry["route"] == "/api/answer"
        assert entry["status"] == 200

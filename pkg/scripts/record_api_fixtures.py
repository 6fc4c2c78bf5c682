"""Record real API responses as fixtures for the web console's tests.

Boots the service against the bundled fixture endpoint and captures the
exact JSON the console consumes.  Run from the repository root:

    python scripts/record_api_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from askgraph.config import fixture_path
from askgraph.fixture import FixtureServer, FixtureStore
from askgraph.service import create_app

Q_RUNNING = (
    "Name the sea into which Danish Straits flows and has Kaliningrad"
    " as one of the city on the shore"
)

OUT = Path(__file__).resolve().parents[1] / "frontend/tests/fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    store = FixtureStore.from_ntriples(fixture_path("dbpedia_slice.nt"))
    with FixtureServer(store) as server:
        app = create_app(
            {
                "endpoint": server.url,
                "embeddings": fixture_path("embeddings.txt"),
                "max_retries": 0,
            }
        )
        with TestClient(app) as client:
            answer = client.post("/api/answer", json={"question": Q_RUNNING})
            answer.raise_for_status()
            answer_payload = answer.json()
            (OUT / "answer_running_example.json").write_text(
                json.dumps(answer_payload, indent=2)
            )

            rank1 = answer_payload["plans"][0]
            execute = client.post("/api/execute", json={"query": rank1["sparql"]})
            execute.raise_for_status()
            (OUT / "execute_rank1_unchanged.json").write_text(
                json.dumps(execute.json(), indent=2)
            )

            edited = rank1["sparql"].replace("property/outflow", "property/inflow")
            swapped = client.post("/api/execute", json={"query": edited})
            swapped.raise_for_status()
            (OUT / "execute_rank1_inflow_swap.json").write_text(
                json.dumps(swapped.json(), indent=2)
            )

            health = client.get("/api/health")
            (OUT / "health.json").write_text(json.dumps(health.json(), indent=2))

            boolean = client.post(
                "/api/answer", json={"question": "Is Berlin the capital of Germany?"}
            )
            boolean.raise_for_status()
            (OUT / "answer_boolean.json").write_text(json.dumps(boolean.json(), indent=2))

            failing = client.post(
                "/api/answer",
                json={
                    "question": Q_RUNNING,
                    "endpoint_url": "http://127.0.0.1:1/sparql",
                    "overrides": {"timeout": 0.2, "max_retries": 0},
                },
            )
            (OUT / "answer_linking_error.json").write_text(
                json.dumps(
                    {"status": failing.status_code, "body": failing.json()}, indent=2
                )
            )
    print(f"recorded fixtures in {OUT}")


if __name__ == "__main__":
    main()

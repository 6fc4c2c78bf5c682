"""HTTP service exposing the pipeline.

Routes (all JSON, shared with the web console):
  POST /api/answer     {question, endpoint_url?, dialect?, overrides?}
  POST /api/execute    {query, endpoint_url?, dialect?}   raw what-if runs
  POST /api/benchmark  multipart file upload
  GET  /api/health
  GET  /api/config
"""

from __future__ import annotations

import json
import logging
import tempfile
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, UploadFile
from fastapi.staticfiles import StaticFiles

from .affinity import EmbeddingStore
from .config import KNOWN_KEYS, PipelineConfig, build_config
from .errors import AskGraphError, ConfigError, EndpointError, PhaseError, Transport
from .execution import AnswerSet, RawAnswer
from .graph import pgp_to_dict, prediction_to_dict
from .pipeline import AnswerResult, answer_question, run_benchmark
from .planner import plan_to_dict
from .sparql import EndpointConfig, execute_ask, execute_select

request_log = logging.getLogger("askgraph.requests")


def _term_dict(answer: RawAnswer) -> dict:
    return {
        "value": answer.term.value,
        "kind": answer.term.kind,
        "datatype": answer.term.datatype,
        "lang": answer.term.lang,
        "class_type": answer.class_type,
        "source_rank": answer.source_rank,
    }


def answers_to_dict(answers: AnswerSet) -> dict:
    return {
        "answers": [dict(_term_dict(a), kept=True) for a in answers.answers],
        "dropped": [
            dict(_term_dict(a), kept=False, reason=reason)
            for a, reason in answers.dropped
        ],
        "diagnostics": answers.diagnostics,
    }


def result_to_dict(result: AnswerResult) -> dict:
    payload = {
        "question": result.question,
        "prediction": prediction_to_dict(result.prediction),
        "pgp": pgp_to_dict(result.pgp),
        "agp": pgp_to_dict(result.agp),
        "plans": [plan_to_dict(p) for p in result.plans],
        "timings": {k: round(v, 6) for k, v in result.timings.items()},
        "pipeline_diagnostics": result.diagnostics,
    }
    payload.update(answers_to_dict(result.answers))
    return payload


def create_app(
    settings: dict,
    console_dir: str | None = None,
) -> FastAPI:
    """Build the service around base settings (see config.KNOWN_KEYS)."""
    app = FastAPI(title="askgraph", version="0.1.0")
    state = {"store": None, "lock": threading.Lock(), "settings": dict(settings)}

    def embedding_store() -> EmbeddingStore:
        with state["lock"]:
            if state["store"] is None:
                path = state["settings"].get("embeddings")
                if not path:
                    raise ConfigError("no embeddings configured")
                state["store"] = EmbeddingStore.from_file(path)
            return state["store"]

    def request_config(body: dict) -> PipelineConfig:
        merged = dict(state["settings"])
        if body.get("endpoint_url"):
            merged["endpoint"] = body["endpoint_url"]
        if body.get("dialect"):
            merged["dialect"] = body["dialect"]
        overrides = body.get("overrides") or {}
        unknown = set(overrides) - KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown override keys: {sorted(unknown)}")
        merged.update(overrides)
        return build_config(merged)

    def fail(status: int, phase: str, message: str):
        raise HTTPException(status_code=status, detail={"phase": phase, "message": message})

    def log_request(route: str, status: int, started: float, **extra):
        record = {"route": route, "status": status,
                  "duration": round(time.perf_counter() - started, 6)}
        record.update(extra)
        request_log.info("%s", json.dumps(record))

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": "0.1.0"}

    @app.get("/api/config")
    def config():
        visible = dict(state["settings"])
        return {"settings": visible, "defaults": {
            "max_vr": 400, "k_vertices": 1, "k_predicates": 20,
            "per_vertex_limit": 100, "max_queries": 40, "tau": 0.5,
        }}

    @app.post("/api/answer")
    async def answer(request: Request):
        started = time.perf_counter()
        body = await request.json()
        question = (body or {}).get("question", "")
        if not question.strip():
            fail(422, "request", "question is required")
        try:
            cfg = request_config(body)
            result = answer_question(question, cfg, embedding_store())
        except ConfigError as exc:
            fail(422, "config", str(exc))
        except PhaseError as exc:
            status = 502 if isinstance(exc.cause, (Transport, EndpointError)) else 422
            log_request("/api/answer", status, started, question=question)
            fail(status, exc.phase, str(exc.cause))
        log_request("/api/answer", 200, started, question=question)
        return result_to_dict(result)

    @app.post("/api/execute")
    async def execute(request: Request):
        started = time.perf_counter()
        body = await request.json()
        query = (body or {}).get("query", "")
        if not query.strip():
            fail(422, "request", "query is required")
        try:
            cfg = request_config(body)
        except ConfigError as exc:
            fail(422, "config", str(exc))
        endpoint: EndpointConfig = cfg.endpoint
        try:
            if query.lstrip().upper().startswith("ASK"):
                payload = {"form": "ask", "boolean": execute_ask(endpoint, query)}
            else:
                table = execute_select(endpoint, query)
                payload = {
                    "form": "select",
                    "variables": table.variables,
                    "rows": [
                        {
                            name: {
                                "value": term.value,
                                "kind": term.kind,
                                "datatype": term.datatype,
                                "lang": term.lang,
                            }
                            for name, term in row.items()
                        }
                        for row in table.rows
                    ],
                }
        except (Transport, EndpointError) as exc:
            log_request("/api/execute", 502, started)
            fail(502, "execution", str(exc))
        except AskGraphError as exc:
            fail(422, "execution", str(exc))
        log_request("/api/execute", 200, started)
        return payload

    @app.post("/api/benchmark")
    async def benchmark(file: UploadFile):
        started = time.perf_counter()
        content = await file.read()
        with tempfile.NamedTemporaryFile("wb", suffix=".json", delete=False) as handle:
            handle.write(content)
            temp_path = handle.name
        try:
            cfg = request_config({})
            report = run_benchmark(temp_path, cfg, embedding_store())
        except AskGraphError as exc:
            log_request("/api/benchmark", 422, started)
            fail(422, "benchmark", str(exc))
        finally:
            Path(temp_path).unlink(missing_ok=True)
        log_request("/api/benchmark", 200, started)
        return report

    if console_dir and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app

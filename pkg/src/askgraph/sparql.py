"""SPARQL 1.1 protocol client.

Speaks the standard protocol (POST with a form-encoded ``query``), parses the
JSON results format into typed bindings, and renders the dialect-specific
full-text search fragment used by the linking probes.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass, field

import requests

from .errors import (
    EndpointError,
    MalformedResults,
    Transport,
    UnsupportedDialect,
)

VIRTUOSO = "virtuoso"
STARDOG = "stardog"
GENERIC_REGEX = "generic_regex"
DIALECTS = (VIRTUOSO, STARDOG, GENERIC_REGEX)

RESULTS_JSON = "application/sparql-results+json"
STARDOG_TEXT_MATCH = "tag:stardog:api:property:textMatch"

# exponential backoff base for transport retries; tests shrink it
BACKOFF_BASE = 0.25


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    dialect: str = VIRTUOSO
    request_timeout: float = 15.0
    max_retries: int = 2
    default_graph: str | None = None

    def __post_init__(self):
        if not re.match(r"^https?://", self.url):
            raise ValueError(f"endpoint url must be http(s): {self.url!r}")
        if self.dialect not in DIALECTS:
            raise ValueError(f"unknown dialect: {self.dialect!r}")
        if not 0 <= self.max_retries <= 5:
            raise ValueError("max_retries must be between 0 and 5")


@dataclass(frozen=True)
class RDFTerm:
    kind: str  # "iri" | "literal" | "bnode"
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self):
        if self.kind not in ("iri", "literal", "bnode"):
            raise ValueError(f"unknown term kind: {self.kind!r}")
        if self.kind != "literal" and (self.datatype or self.lang):
            raise ValueError("datatype/lang only apply to literals")
        if self.datatype and self.lang:
            raise ValueError("datatype and lang are mutually exclusive")

    @staticmethod
    def iri(value: str) -> "RDFTerm":
        return RDFTerm("iri", value)

    @staticmethod
    def literal(value: str, datatype: str | None = None, lang: str | None = None) -> "RDFTerm":
        return RDFTerm("literal", value, datatype=datatype, lang=lang)


@dataclass
class BindingsTable:
    variables: list[str]
    rows: list[dict[str, RDFTerm]] = field(default_factory=list)


# concurrent in-flight requests are capped endpoint-wide
_connection_limit = threading.BoundedSemaphore(8)


def configure_connection_limit(limit: int) -> None:
    global _connection_limit
    _connection_limit = threading.BoundedSemaphore(limit)


def _post(cfg: EndpointConfig, query: str) -> dict:
    data = {"query": query}
    if cfg.default_graph:
        data["default-graph-uri"] = cfg.default_graph
    last_exc: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            time.sleep(BACKOFF_BASE * 2 ** (attempt - 1))
        try:
            with _connection_limit:
                response = requests.post(
                    cfg.url,
                    data=data,
                    headers={"Accept": RESULTS_JSON},
                    timeout=cfg.request_timeout,
                )
        except requests.RequestException as exc:
            last_exc = exc
            continue
        if response.status_code >= 400:
            raise EndpointError(response.status_code, response.text[:300])
        try:
            return response.json()
        except ValueError as exc:
            raise MalformedResults(f"endpoint reply is not JSON: {exc}") from exc
    raise Transport(f"{cfg.url} unreachable after {cfg.max_retries + 1} attempts: {last_exc}")


def _parse_term(data: dict) -> RDFTerm:
    try:
        kind = data["type"]
        value = data["value"]
    except (KeyError, TypeError) as exc:
        raise MalformedResults(f"binding without type/value: {data!r}") from exc
    if kind == "uri":
        return RDFTerm.iri(value)
    if kind in ("literal", "typed-literal"):
        return RDFTerm.literal(
            value, datatype=data.get("datatype"), lang=data.get("xml:lang")
        )
    if kind == "bnode":
        return RDFTerm("bnode", value)
    raise MalformedResults(f"unknown term type {kind!r}")


def execute_select(cfg: EndpointConfig, query: str) -> BindingsTable:
    """Run a SELECT and parse the SPARQL JSON results into typed rows."""
    payload = _post(cfg, query)
    try:
        variables = list(payload["head"]["vars"])
        bindings = payload["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise MalformedResults(f"not a SELECT results document: {exc}") from exc
    table = BindingsTable(variables=variables)
    for row in bindings:
        if not isinstance(row, dict):
            raise MalformedResults(f"binding row is not an object: {row!r}")
        table.rows.append({name: _parse_term(term) for name, term in row.items()})
    return table


def execute_ask(cfg: EndpointConfig, query: str) -> bool:
    payload = _post(cfg, query)
    result = payload.get("boolean")
    if not isinstance(result, bool):
        raise MalformedResults("not an ASK results document")
    return bool(result)


def _escape_keyword(keyword: str) -> str:
    # Virtuoso quoting is fragile: quotes are stripped, not escaped.
    return keyword.replace('"', "")


def render_contains(dialect: str, var: str, keywords: list[str]) -> str:
    """Dialect-specific full-text containment fragment over OR-ed keywords."""
    if not keywords:
        raise ValueError("keywords must be nonempty")
    escaped = [_escape_keyword(k) for k in keywords]
    if any(not k for k in escaped):
        raise ValueError("keyword empty after escaping")
    if dialect == VIRTUOSO:
        joined = " OR ".join(f'"{k}"' for k in escaped)
        return f"?{var} <bif:contains> '({joined})'"
    if dialect == STARDOG:
        joined = " OR ".join(f'"{k}"' for k in escaped)
        return f"?{var} <{STARDOG_TEXT_MATCH}> '({joined})'"
    if dialect == GENERIC_REGEX:
        alternation = "|".join(re.escape(k) for k in escaped)
        pattern = alternation.replace("\\", "\\\\")
        return f'FILTER(regex(str(?{var}), "{pattern}", "i"))'
    raise UnsupportedDialect(dialect)


# Endpoints that rejected the native containment syntax are downgraded to the
# regex fallback once, then remembered.
_regex_fallback: set[str] = set()
_fallback_lock = threading.Lock()


def contains_dialect(cfg: EndpointConfig) -> str:
    with _fallback_lock:
        if cfg.url in _regex_fallback:
            return GENERIC_REGEX
    return cfg.dialect


def mark_contains_unsupported(cfg: EndpointConfig) -> None:
    with _fallback_lock:
        _regex_fallback.add(cfg.url)


def reset_contains_fallback() -> None:
    with _fallback_lock:
        _regex_fallback.clear()
